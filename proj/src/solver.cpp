#include "virtblow/solver.hpp"

#include <algorithm>
#include <map>

#include "virtblow/errors.hpp"
#include "virtblow/universal.hpp"

namespace vb {

namespace {

using JetSeries = TruncSeries<Jet>;

JetSeries lift_to(const Series& s, int n) { return lift(s.truncated(n)); }

Series project(const JetSeries& s) {
  return map_coeffs<CycNum>(s, [](const Jet& j) { return j.value(); });
}

Family project(const UniversalFamily<Jet>& f) {
  Family r;
  r.rho = f.rho;
  r.kind = f.kind;
  r.parameter = f.parameter;
  for (const auto& s : f.base) r.base.push_back(project(s));
  for (const auto& s : f.weight) r.weight.push_back(project(s));
  for (const auto& s : f.linear) r.linear.push_back(project(s));
  return r;
}

JetSeries jet_one(const CycContextPtr& ctx, int n) { return lift(Series::constant(CycNum(ctx, Rational(1)), n)); }

std::string pair_name(const std::string& stem, int i, int j) {
  return stem + "_" + std::to_string(i) + std::to_string(j);
}

std::vector<UnknownSlot> slots_above(std::size_t series_count, int known_through, int max_order, int step) {
  std::vector<UnknownSlot> out;
  for (std::size_t s = 0; s < series_count; ++s) {
    for (int k = known_through + 1; k <= max_order; ++k) {
      if (k % step == 0) out.push_back({s, k});
    }
  }
  return out;
}

bool same_series(const Series& a, const Series& b) { return is_zero(a - b); }

}  // namespace

std::string Ansatz::slot_name(std::size_t k) const {
  const UnknownSlot& s = slots.at(k);
  return names.at(s.series) + "[" + std::to_string(s.order) + "]";
}

Ansatz gamma_ansatz(int rho, int max_order, int known_through) {
  const Family fam = family_verlinde(rho, 0, max_order);
  const ConstantTable& tab = beta_table(rho);
  const auto ctx = tab.ctx;
  const auto grid = gamma_pairs(rho, max_order);
  const IndexedParts parts = decompose_J(fam.base, AssembleMode::multiplicative);

  Ansatz an;
  an.rho = rho;
  an.kind = FamilyKind::verlinde;
  an.parameter = 0;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < rho; ++i) {
    for (int j = i + 1; j < rho; ++j) {
      pairs.emplace_back(i, j);
      an.names.push_back(pair_name("gamma", i, j));
      an.seeds.push_back(grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }
  // gamma_ij lies in 1 + w^2 C[[w^2]]
  an.slots = slots_above(pairs.size(), known_through, max_order, 2);

  // (prod_{i in J} A_i)^{rho/2}, the known part of gamma_J
  std::vector<Series> known;
  for (SubsetMask J = 0; J < subset_count(rho); ++J) {
    Series prod = Series::constant(CycNum(ctx, Rational(1)), max_order);
    for (int i : subset_members(J)) prod = prod * parts.per_index[static_cast<std::size_t>(i - 1)];
    known.push_back(pow(prod, ratio(rho, 2)));
  }

  an.build = [fam, known, pairs, rho, ctx, beta = tab.beta_J](const std::vector<JetSeries>& unknown, int n) {
    const auto m = static_cast<std::size_t>(rho);
    std::vector<std::vector<JetSeries>> g(m, std::vector<JetSeries>(m));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      auto [i, j] = pairs[p];
      g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = unknown[p];
      g[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = unknown[p];
    }
    UniversalFamily<Jet> out;
    out.rho = rho;
    out.kind = FamilyKind::verlinde;
    out.parameter = 0;
    const SubsetMask count = subset_count(rho);
    std::vector<JetSeries> gamma;
    JetSeries B0 = lift(Series::constant(CycNum(ctx), n));
    for (SubsetMask J = 0; J < count; ++J) {
      JetSeries prod = lift_to(known[J], n);
      for (int i : subset_members(J)) {
        for (int j = 1; j < rho; ++j) {
          if (!contains(J, j)) prod = prod * g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
      }
      prod = prod * Jet(beta[J]);
      B0 += prod;
      gamma.push_back(std::move(prod));
    }
    for (SubsetMask J = 0; J < count; ++J) {
      out.base.push_back(lift_to(fam.base[J], n));
      out.weight.push_back(B0 * inverse(gamma[J]));
    }
    return out;
  };
  return an;
}

Ansatz segre_linear_ansatz(int rho, int max_order) {
  const Family fam = family_segre(rho, 0, max_order);
  const auto ctx = cyc_context(rho);
  Ansatz an;
  an.rho = rho;
  an.kind = FamilyKind::segre;
  an.parameter = 0;
  an.names.push_back("s_0");
  for (int i = 1; i < rho; ++i) an.names.push_back("s_" + std::to_string(i));
  for (std::size_t k = 0; k < an.names.size(); ++k) {
    an.seeds.push_back(Series::constant(CycNum(ctx), max_order));
    an.slots.push_back({k, 1});
  }
  an.affine = true;
  an.build = [fam, rho](const std::vector<JetSeries>& unknown, int n) {
    UniversalFamily<Jet> out;
    out.rho = rho;
    out.kind = FamilyKind::segre;
    out.parameter = 0;
    for (SubsetMask J = 0; J < subset_count(rho); ++J) {
      out.base.push_back(lift_to(fam.base[J], n));
      out.weight.push_back(lift_to(fam.weight[J], n));
      JetSeries lin = unknown[0];
      for (int i : subset_members(J)) lin += unknown[static_cast<std::size_t>(i)];
      out.linear.push_back(std::move(lin));
    }
    return out;
  };
  return an;
}

Ansatz decomposed_ansatz(const Family& family, int known_through) {
  const int rho = family.rho;
  const int order = family.order();
  const auto ctx = cyc_context(rho);
  const bool segre = family.kind == FamilyKind::segre;
  const std::string base_prefix = segre ? "Y" : "A", weight_prefix = segre ? "Z" : "B";

  const IndexedParts base = decompose_J(family.base, AssembleMode::multiplicative);
  if (assemble_J(base.base, base.per_index, AssembleMode::multiplicative) != family.base) {
    throw DomainError("family base series are not of product form");
  }
  const PairParts weight = decompose_pairs(family.weight);
  if (assemble_pairs(weight.base, weight.pairs) != family.weight) {
    throw DomainError("family weight series are not of pair-product form");
  }

  Ansatz an;
  an.rho = rho;
  an.kind = family.kind;
  an.parameter = family.parameter;
  an.seed_source = "given family through order " + std::to_string(known_through);
  an.names.push_back(base_prefix + "_{}");
  an.seeds.push_back(base.base);
  for (int i = 1; i < rho; ++i) {
    an.names.push_back(base_prefix + "_" + std::to_string(i));
    an.seeds.push_back(base.per_index[static_cast<std::size_t>(i - 1)]);
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < rho; ++i) {
    for (int j = i; j < rho; ++j) {
      pairs.emplace_back(i, j);
      an.names.push_back(pair_name(weight_prefix, i, j));
      an.seeds.push_back(weight.pairs[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]);
    }
  }
  // B_{} = sum_J 1 / prod_{i <= j in J} B_ij
  {
    Series total = Series::constant(CycNum(ctx), order);
    for (SubsetMask J = 0; J < subset_count(rho); ++J) total += inverse(family.weight[J]);
    if (!same_series(total, Series::constant(CycNum(ctx, Rational(1)), order))) {
      throw DomainError("family weights violate the normalization sum_J B_{}/B_J = B_{}");
    }
  }
  const std::size_t linear_start = an.names.size();
  if (segre) {
    const IndexedParts lin = decompose_J(family.linear, AssembleMode::additive);
    if (assemble_J(lin.base, lin.per_index, AssembleMode::additive) != family.linear) {
      throw DomainError("family linear series are not of additive form");
    }
    an.names.push_back("S_{}");
    an.seeds.push_back(lin.base);
    for (int i = 1; i < rho; ++i) {
      an.names.push_back("S_" + std::to_string(i));
      an.seeds.push_back(lin.per_index[static_cast<std::size_t>(i - 1)]);
    }
  }
  an.slots = slots_above(an.names.size(), known_through, order, 1);

  an.build = [rho, pairs, segre, linear_start, kind = family.kind, param = family.parameter, ctx](
                 const std::vector<JetSeries>& unknown, int n) {
    UniversalFamily<Jet> out;
    out.rho = rho;
    out.kind = kind;
    out.parameter = param;
    const SubsetMask count = subset_count(rho);
    std::vector<JetSeries> beta_inv;  // prod_{i <= j in J} B_ij
    JetSeries B0 = lift(Series::constant(CycNum(ctx), n));
    for (SubsetMask J = 0; J < count; ++J) {
      JetSeries prod = jet_one(ctx, n);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (contains(J, pairs[p].first) && contains(J, pairs[p].second)) {
          prod = prod * unknown[static_cast<std::size_t>(rho) + p];
        }
      }
      B0 += inverse(prod);
      beta_inv.push_back(std::move(prod));
    }
    for (SubsetMask J = 0; J < count; ++J) {
      JetSeries a = unknown[0];
      for (int i : subset_members(J)) a = a * unknown[static_cast<std::size_t>(i)];
      out.base.push_back(std::move(a));
      out.weight.push_back(B0 * beta_inv[J]);
      if (segre) {
        JetSeries s = unknown[linear_start];
        for (int i : subset_members(J)) s += unknown[linear_start + static_cast<std::size_t>(i)];
        out.linear.push_back(std::move(s));
      }
    }
    return out;
  };
  return an;
}

Ansatz fixed_ansatz(const Family& family) {
  Ansatz an;
  an.rho = family.rho;
  an.kind = family.kind;
  an.parameter = family.parameter;
  an.seed_source = "given family";
  an.build = [family](const std::vector<JetSeries>&, int n) { return lift(truncated(family, n)); };
  return an;
}

LinearSolution solve_linear(const LinearSystem& system, std::size_t unknowns, const CycContextPtr& ctx) {
  // Rows are absorbed one at a time into a reduced echelon basis; once the
  // rank is full the remaining rows are only checked against the solution.
  struct BasisRow {
    std::size_t pivot;
    std::vector<CycNum> coeffs;
    CycNum rhs;
  };
  std::vector<BasisRow> basis;
  LinearSolution out;
  std::optional<std::vector<CycNum>> x;
  for (std::size_t i = 0; i < system.rows.size(); ++i) {
    std::vector<CycNum> row = system.rows[i];
    row.resize(unknowns, CycNum(ctx));
    CycNum rhs = system.rhs[i];
    if (x) {
      CycNum lhs(ctx);
      for (std::size_t c = 0; c < unknowns; ++c) {
        if (!is_zero(row[c])) lhs += row[c] * (*x)[c];
      }
      if (lhs != rhs) {
        out.inconsistent_row = i;
        break;
      }
      continue;
    }
    for (const auto& b : basis) {
      if (is_zero(row[b.pivot])) continue;
      const CycNum f = row[b.pivot];
      for (std::size_t c = 0; c < unknowns; ++c) {
        if (!is_zero(b.coeffs[c])) row[c] -= f * b.coeffs[c];
      }
      rhs -= f * b.rhs;
    }
    std::size_t p = 0;
    while (p < unknowns && is_zero(row[p])) ++p;
    if (p == unknowns) {
      if (!is_zero(rhs)) {
        out.inconsistent_row = i;
        break;
      }
      continue;
    }
    const CycNum inv = row[p].inverse();
    for (auto& c : row) c *= inv;
    rhs *= inv;
    for (auto& b : basis) {
      if (is_zero(b.coeffs[p])) continue;
      const CycNum f = b.coeffs[p];
      for (std::size_t c = 0; c < unknowns; ++c) {
        if (!is_zero(row[c])) b.coeffs[c] -= f * row[c];
      }
      b.rhs -= f * rhs;
    }
    basis.push_back({p, std::move(row), std::move(rhs)});
    if (basis.size() == unknowns) {
      x.emplace(unknowns, CycNum(ctx));
      for (const auto& b : basis) (*x)[b.pivot] = b.rhs;
    }
  }
  out.rank = basis.size();
  std::vector<bool> has_pivot(unknowns, false);
  for (const auto& b : basis) has_pivot[b.pivot] = true;
  for (std::size_t c = 0; c < unknowns; ++c) {
    if (!has_pivot[c]) out.free_columns.push_back(c);
  }
  if (out.inconsistent_row) return out;
  out.determined.assign(unknowns, std::nullopt);
  for (const auto& b : basis) {
    bool fixed = true;
    for (std::size_t c : out.free_columns) fixed = fixed && is_zero(b.coeffs[c]);
    if (fixed) out.determined[b.pivot] = b.rhs;
  }
  out.solution = std::move(x);
  return out;
}

namespace {

// A residual coefficient as a polynomial of degree <= 2 in the open slots:
// sum of terms + constant = 0. Linear monomials are (k, linear_marker).
constexpr std::size_t linear_marker = static_cast<std::size_t>(-1);
using Monomial = std::pair<std::size_t, std::size_t>;

struct PolyRow {
  std::map<Monomial, CycNum> terms;
  CycNum constant;
  std::string label;
};

void add_term(std::map<Monomial, CycNum>& terms, const Monomial& m, const CycNum& c) {
  if (is_zero(c)) return;
  auto [it, inserted] = terms.emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (is_zero(it->second)) terms.erase(it);
}

PolyRow substitute(const PolyRow& row, const std::vector<std::optional<CycNum>>& values) {
  PolyRow out{{}, row.constant, row.label};
  for (const auto& [m, c] : row.terms) {
    const auto& vk = values[m.first];
    if (m.second == linear_marker) {
      if (vk) {
        out.constant += c * *vk;
      } else {
        add_term(out.terms, m, c);
      }
      continue;
    }
    const auto& vl = values[m.second];
    if (vk && vl) {
      out.constant += c * *vk * *vl;
    } else if (vk) {
      add_term(out.terms, {m.second, linear_marker}, c * *vk);
    } else if (vl) {
      add_term(out.terms, {m.first, linear_marker}, c * *vl);
    } else {
      add_term(out.terms, m, c);
    }
  }
  return out;
}

}  // namespace

SolveResult solve_incremental(const Ansatz& ansatz, const std::vector<RelationId>& relations, int max_order,
                              const SolveOptions& opts) {
  if (!ansatz.build) throw DomainError("ansatz has no builder");
  if (max_order < 0) throw DomainError("max_order must be non-negative");
  if (opts.lookahead < 0) throw DomainError("lookahead must be non-negative");
  if (ansatz.seeds.size() != ansatz.names.size()) throw DomainError("ansatz needs one seed per unknown series");
  for (const auto& id : relations) validate_relation(id, ansatz.kind, ansatz.rho, ansatz.parameter);
  const auto ctx = cyc_context(ansatz.rho);
  const int last = max_order + opts.lookahead;
  const std::size_t nslots = ansatz.slots.size();
  const Convention& conv = opts.convention;

  std::map<std::pair<std::size_t, int>, std::size_t> slot_at;
  for (std::size_t k = 0; k < nslots; ++k) {
    const auto& s = ansatz.slots[k];
    if (s.series >= ansatz.names.size()) throw DomainError("slot refers to a missing series");
    if (s.order < 1 || s.order > last) {
      throw DomainError("slot " + ansatz.slot_name(k) + " lies outside orders 1.." + std::to_string(last));
    }
    if (!slot_at.emplace(std::make_pair(s.series, s.order), k).second) {
      throw DomainError("duplicate slot " + ansatz.slot_name(k));
    }
  }
  auto order_of = [&](std::size_t k) { return ansatz.slots[k].order; };

  SolveResult result;
  result.values.assign(nslots, std::nullopt);
  result.determined_at.assign(nslots, -1);
  result.relations = relations;
  result.convention = conv;
  result.max_order = max_order;
  result.seed_source = ansatz.seed_source;

  std::vector<std::size_t> pending;
  auto names_of = [&](const std::vector<std::size_t>& ks) {
    std::string out;
    for (std::size_t k : ks) out += (out.empty() ? "" : ", ") + ansatz.slot_name(k);
    return out;
  };

  // The unknown series at order n: solved slots take their values, open slots
  // become jets around 0 (or 1 for the slot `unit`).
  auto unknown_series = [&](int n, bool with_jets, std::optional<std::size_t> unit) {
    std::vector<JetSeries> out;
    for (std::size_t s = 0; s < ansatz.names.size(); ++s) {
      const Series& seed = ansatz.seeds[s];
      std::vector<Jet> c;
      for (int k = 0; k <= n; ++k) {
        auto it = slot_at.find({s, k});
        if (it == slot_at.end()) {
          c.emplace_back(k <= seed.order() ? seed[k] : CycNum(ctx));
          continue;
        }
        if (const auto& v = result.values[it->second]; v) {
          c.emplace_back(*v);
          continue;
        }
        const CycNum at(ctx, Rational(unit == it->second ? 1 : 0));
        auto pos = std::find(pending.begin(), pending.end(), it->second);
        if (!with_jets || pos == pending.end()) {
          c.emplace_back(at);
        } else {
          c.push_back(Jet::slot(at, static_cast<std::size_t>(pos - pending.begin()), pending.size()));
        }
      }
      out.emplace_back(std::move(c));
    }
    return out;
  };
  auto residual_coeffs = [&](int n, std::optional<std::size_t> unit) {
    const UniversalFamily<Jet> fam = ansatz.build(unknown_series(n, true, unit), n);
    RelationEvaluator<Jet> ev(fam);
    std::vector<Jet> out;
    for (const auto& id : relations) out.push_back(ev.residual(id, conv)[n]);
    return out;
  };

  std::vector<PolyRow> rows;
  for (int n = 0; n <= last; ++n) {
    for (std::size_t k = 0; k < nslots; ++k) {
      if (order_of(k) == n) pending.push_back(k);
    }
    int min_order = last + 1;
    for (std::size_t k : pending) min_order = std::min(min_order, order_of(k));
    if (ansatz.affine) min_order = last + 1;
    if (!pending.empty() && 3 * min_order <= n) {
      throw SolveError("nonlinear dependence beyond second order at order " + std::to_string(n) +
                       ": slots still open: " + names_of(pending));
    }
    // Open slots that can occur in a product at this order; their second
    // derivatives come from the jets at the unit points.
    std::vector<std::size_t> in_products;
    for (std::size_t k : pending) {
      if (order_of(k) + min_order <= n) in_products.push_back(k);
    }

    const std::vector<Jet> at_zero = residual_coeffs(n, std::nullopt);
    std::vector<std::vector<Jet>> at_unit;
    for (std::size_t k : in_products) at_unit.push_back(residual_coeffs(n, k));

    for (std::size_t r = 0; r < relations.size(); ++r) {
      const Jet& c = at_zero[r];
      const std::string label = to_string(relations[r]) + " at order " + std::to_string(n);
      PolyRow row{{}, c.value(), label};
      for (std::size_t p = 0; p < pending.size(); ++p) add_term(row.terms, {pending[p], linear_marker}, c.derivative(p));
      for (std::size_t u = 0; u < in_products.size(); ++u) {
        const std::size_t k = in_products[u];
        for (std::size_t p = 0; p < pending.size(); ++p) {
          const std::size_t l = pending[p];
          if (l < k || std::find(in_products.begin(), in_products.end(), l) == in_products.end()) continue;
          CycNum h = at_unit[u][r].derivative(p) - c.derivative(p);
          if (l == k) h *= ratio(1, 2);
          add_term(row.terms, {k, l}, h);
        }
      }
      if (row.terms.empty()) {
        if (!is_zero(row.constant)) throw SolveError("inconsistent: " + label + " does not vanish");
        continue;
      }
      rows.push_back(std::move(row));
    }
    if (pending.empty() || rows.empty()) continue;

    std::map<Monomial, std::size_t> column;
    for (const auto& row : rows) {
      for (const auto& [m, c] : row.terms) column.emplace(m, 0);
    }
    std::vector<Monomial> monomials;
    for (auto& [m, idx] : column) {
      idx = monomials.size();
      monomials.push_back(m);
    }
    LinearSystem system;
    for (const auto& row : rows) {
      std::vector<CycNum> dense(monomials.size(), CycNum(ctx));
      for (const auto& [m, c] : row.terms) dense[column[m]] = c;
      system.rows.push_back(std::move(dense));
      system.rhs.push_back(-row.constant);
      system.labels.push_back(row.label);
    }
    const LinearSolution sol = solve_linear(system, monomials.size(), ctx);
    if (sol.inconsistent_row) {
      throw SolveError("inconsistent at order " + std::to_string(n) + ": " + system.labels[*sol.inconsistent_row] +
                       " (open slots " + names_of(pending) + ")");
    }
    std::vector<std::size_t> fixed;
    for (std::size_t c = 0; c < monomials.size(); ++c) {
      if (monomials[c].second == linear_marker && sol.determined[c]) {
        result.values[monomials[c].first] = *sol.determined[c];
        result.determined_at[monomials[c].first] = n;
        fixed.push_back(monomials[c].first);
      }
    }
    if (fixed.empty()) continue;
    for (std::size_t c = 0; c < monomials.size(); ++c) {
      const auto [k, l] = monomials[c];
      if (l == linear_marker || !sol.determined[c] || !result.values[k] || !result.values[l]) continue;
      if (*result.values[k] * *result.values[l] != *sol.determined[c]) {
        throw SolveError("inconsistent at order " + std::to_string(n) + ": product of " + ansatz.slot_name(k) +
                         " and " + ansatz.slot_name(l) + " disagrees with its factors");
      }
    }
    std::erase_if(pending, [&](std::size_t k) { return result.values[k].has_value(); });
    std::vector<PolyRow> kept;
    for (const auto& row : rows) {
      PolyRow r = substitute(row, result.values);
      if (r.terms.empty()) {
        if (!is_zero(r.constant)) throw SolveError("inconsistent at order " + std::to_string(n) + ": " + r.label);
        continue;
      }
      kept.push_back(std::move(r));
    }
    rows = std::move(kept);

    if (pending.empty()) {
      // Every residual through order n is now exact; recheck it.
      const Family exact = project(ansatz.build(unknown_series(n, false, std::nullopt), n));
      RelationEvaluator<CycNum> check(exact);
      for (const auto& id : relations) {
        if (auto k = first_nonzero(check.residual(id, conv)); k) {
          throw SolveError("nonlinear dependence: solving " + names_of(fixed) + " at order " + std::to_string(n) +
                           " leaves " + to_string(id) + " nonzero at order " + std::to_string(*k));
        }
      }
    }
  }
  std::vector<std::size_t> open;
  for (std::size_t k : pending) {
    if (order_of(k) <= max_order) open.push_back(k);
  }
  if (!open.empty()) {
    throw SolveError("underdetermined through order " + std::to_string(last) + ": free slots " + names_of(open));
  }
  result.family = project(ansatz.build(unknown_series(max_order, false, std::nullopt), max_order));
  const ResidualReport report = verify_family(result.family, relations, conv);
  if (!report.clean()) throw SolveError("solved family fails verification");
  return result;
}

ConstantsResult solve_constants_subset(const Family& family, const std::vector<RelationId>& relations,
                                       std::optional<Convention> conv) {
  if (family.kind != FamilyKind::verlinde) throw DomainError("constants are solved for Verlinde families");
  for (const auto& id : relations) validate_relation(id, family.kind, family.rho, family.parameter);
  const int rho = family.rho;
  const int order = family.order();
  const auto ctx = cyc_context(rho);
  const SubsetMask count = subset_count(rho);

  // Weight jets 1 - e_J have inverse 1 + e_J; the left-hand sides are linear in
  // the inverse weights, so the jets give the rows exactly with x_J = 1 + delta_J.
  UniversalFamily<Jet> fam;
  fam.rho = rho;
  fam.kind = family.kind;
  fam.parameter = family.parameter;
  for (SubsetMask J = 0; J < count; ++J) {
    fam.base.push_back(lift(family.base[J]));
    std::vector<CycNum> grad(count, CycNum(ctx));
    grad[J] = CycNum(ctx, Rational(-1));
    fam.weight.push_back(JetSeries::constant(Jet(CycNum(ctx, Rational(1)), std::move(grad)), order));
  }
  RelationEvaluator<Jet> ev(fam);

  std::vector<Convention> candidates;
  if (conv) {
    candidates.push_back(*conv);
  } else {
    for (int k = 0; k < 8; ++k) candidates.push_back(Convention::from_index(k));
  }
  std::string last_error;
  for (const Convention& c : candidates) {
    LinearSystem system;
    for (const auto& id : relations) {
      const JetSeries res = ev.residual(id, c);
      for (int k = 0; k <= order; ++k) {
        std::vector<CycNum> row(count, CycNum(ctx));
        for (SubsetMask J = 0; J < count; ++J) row[J] = res[k].derivative(J);
        system.rows.push_back(std::move(row));
        system.rhs.push_back(-res[k].value());
        system.labels.push_back(to_string(id) + " at order " + std::to_string(k));
      }
    }
    const LinearSolution sol = solve_linear(system, count, ctx);
    if (sol.inconsistent_row) {
      last_error = "inconsistent under convention " + to_string(c) + ": " + system.labels[*sol.inconsistent_row];
      continue;
    }
    if (!sol.solution) {
      std::string free;
      for (std::size_t k : sol.free_columns) {
        free += (free.empty() ? "" : ", ") + std::string("1/B_") + subset_label(static_cast<SubsetMask>(k));
      }
      throw SolveError("underdetermined: free slots " + free);
    }
    ConstantsResult out;
    out.convention = c;
    out.relations = relations;
    out.order = order;
    CycNum total(ctx);
    for (SubsetMask J = 0; J < count; ++J) {
      const CycNum x = (*sol.solution)[J] + CycNum(ctx, Rational(1));
      if (is_zero(x)) throw SolveError("B_" + subset_label(J) + " has vanishing inverse");
      total += x;
      out.B_J.push_back(x.inverse());
    }
    // B_{} = sum_J B_{} / B_J
    if (total != CycNum(ctx, Rational(1))) {
      throw SolveError("solution violates the normalization sum_J B_{}/B_J = B_{}");
    }
    return out;
  }
  throw SolveError(last_error);
}

CycNum Interpolant::operator()(const Rational& r) const {
  if (coeffs.empty()) throw DomainError("empty interpolant");
  CycNum acc = zero_like(coeffs.front());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
  return acc;
}

Interpolant interpolate_in_r(const std::vector<std::pair<Rational, CycNum>>& samples, int n) {
  if (samples.empty()) throw DomainError("interpolation needs at least one sample");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if (samples[i].first == samples[j].first) {
        throw DomainError("duplicate sample point r=" + to_string(samples[i].first));
      }
    }
  }
  const CycNum zero = zero_like(samples.front().second);
  const std::size_t m = samples.size();
  Interpolant out;
  out.coeffs.assign(m, zero);
  for (std::size_t i = 0; i < m; ++i) {
    // prod_{j != i} (r - r_j) / (r_i - r_j), ascending coefficients
    std::vector<Rational> basis{Rational(1)};
    Rational denom(1);
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      std::vector<Rational> next(basis.size() + 1, Rational(0));
      for (std::size_t k = 0; k < basis.size(); ++k) {
        next[k + 1] += basis[k];
        next[k] -= basis[k] * samples[j].first;
      }
      basis = std::move(next);
      denom *= samples[i].first - samples[j].first;
    }
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (basis[k] != 0) out.coeffs[k] += samples[i].second * Rational(basis[k] / denom);
    }
  }
  for (int k = static_cast<int>(m) - 1; k >= 0; --k) {
    if (!is_zero(out.coeffs[static_cast<std::size_t>(k)])) {
      out.degree = k;
      break;
    }
  }
  out.bound = n - 1;
  return out;
}

}  // namespace vb
