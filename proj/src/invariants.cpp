#include "virtblow/invariants.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <tuple>
#include <type_traits>

#include "virtblow/errors.hpp"
#include "virtblow/transforms.hpp"
#include "virtblow/universal.hpp"

namespace vb {

namespace {

Rational rational_pow(const Rational& base, long long e) {
  Rational r(1);
  const Rational b = e < 0 ? Rational(1) / base : base;
  for (long long k = 0; k < (e < 0 ? -e : e); ++k) r *= b;
  return r;
}

// Entry i of a per-class list, with an empty list read as all zeros.
template <class T>
T class_entry(const std::vector<T>& values, std::size_t i) {
  return values.empty() ? T(0) : values[i];
}

template <class T>
void check_class_list(const std::vector<T>& values, std::size_t n, const char* what) {
  if (!values.empty() && values.size() != n) {
    throw ConfigError(std::string(what) + " has " + std::to_string(values.size()) + " entries, expected " +
                      std::to_string(n));
  }
}

Series one_series(const CycContextPtr& ctx, int order) {
  return Series::constant(CycNum(ctx, Rational(1)), order);
}

// rho^{2 - chi(O)}
Rational rank_prefactor(int rho, long long chi_O) { return rational_pow(Rational(rho), 2 - chi_O); }

CycNum epsilon_power(const CycContextPtr& ctx, long long e) { return CycNum::root_power(ctx, 4 * e); }

void check_family(const Family& family, FamilyKind kind, int rho, int order) {
  if (family.kind != kind) throw DomainError("expected a " + to_string(kind) + " family");
  if (family.rho != rho) throw DomainError("family rank does not match the setup");
  if (family.order() < order) throw DomainError("family order is below the requested order");
}

// Sum over tuples (a_1, ..., a_{rho-1}) of basic classes of
//   prod_j eps^{j a_j c1} SW(a_j) P_j^{e(a_j)} exp(l(a_j) S_j) prod_{j <= k} Q_jk^{a_j a_k}.
struct TupleSum {
  std::vector<Series> index_parts;     // P_j, 0-based
  std::vector<Rational> index_exp;     // e(a) per class
  std::vector<Series> linear_parts;    // S_j, may be empty
  std::vector<Rational> linear_coef;   // l(a) per class
  std::vector<std::vector<Series>> pair_parts;

  Series evaluate(const SurfaceData& surface, const Setup& setup, const CycContextPtr& ctx, int order) const {
    const int slots = setup.rho - 1;
    const std::size_t classes = surface.classes.size();
    if (slots == 0) return one_series(ctx, order);

    std::vector<std::vector<Series>> factor(static_cast<std::size_t>(slots));
    for (int j = 1; j <= slots; ++j) {
      for (std::size_t a = 0; a < classes; ++a) {
        const auto& cls = surface.classes[a];
        CycNum scalar = epsilon_power(ctx, static_cast<long long>(j) * class_entry(setup.c1_pair, a)) *
                        from_integer(cls.sw);
        Series f = pow(index_parts[j - 1].truncated(order), index_exp[a]);
        if (!linear_parts.empty()) f = f * exp(linear_parts[j - 1].truncated(order) * linear_coef[a]);
        factor[j - 1].push_back(f * scalar);
      }
    }

    std::map<std::tuple<int, int, long long>, Series> pair_cache;
    auto pair_power = [&](int j, int k, long long e) -> const Series& {
      auto key = std::make_tuple(j, k, e);
      auto it = pair_cache.find(key);
      if (it == pair_cache.end()) {
        it = pair_cache.emplace(key, pow_int(pair_parts[j - 1][k - 1].truncated(order), e)).first;
      }
      return it->second;
    };

    Series total = Series::constant(CycNum(ctx), order);
    std::vector<std::size_t> chosen(static_cast<std::size_t>(slots));
    std::function<void(int, const Series&)> walk = [&](int j, const Series& partial) {
      if (j > slots) {
        total += partial;
        return;
      }
      for (std::size_t a = 0; a < classes; ++a) {
        if (surface.classes[a].sw == 0) continue;
        chosen[j - 1] = a;
        Series next = partial * factor[j - 1][a];
        for (int i = 1; i <= j; ++i) {
          const long long e = surface.gram[chosen[i - 1]][a];
          if (e != 0) next = next * pair_power(i, j, e);
        }
        walk(j + 1, next);
      }
    };
    walk(1, one_series(ctx, order));
    return total;
  }
};

std::vector<Rational> class_rationals(const std::vector<Rational>& values, std::size_t n) {
  std::vector<Rational> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = class_entry(values, i);
  return out;
}

// V^{c2 alpha} W^{c1(alpha)^2} X^{chi} exp(L^2 Q + (c1(alpha) L) R + u T), re-expanded in z.
Series segre_prefactor(const SurfaceData& surface, const Setup& setup, int order) {
  const Rational s(setup.alpha.rank);
  const BasicSeries b = basics(setup.rho, s, order);
  Series in_t = pow(b.c2a_base, setup.alpha.c2a) * pow(b.c1a_sq_base, setup.alpha.c1a_sq) * pow_int(b.chi_base, surface.chi_O) *
                exp(b.L2_exponent * setup.line.L2 + b.c1aL_exponent * setup.alpha.c1a_L + b.u_exponent * setup.point_weight);
  return t_series_in_z(in_t, setup.rho, s) * rank_prefactor(setup.rho, surface.chi_O);
}

// G^{chi(L)} F^{chi(O)/2}, re-expanded in w.
Series verlinde_prefactor(const SurfaceData& surface, const Setup& setup, const Rational& r, int order) {
  const BasicSeries b = basics(setup.rho, r, order);
  Series in_v = pow_int(b.chiL_base, setup.chi_L(surface)) * pow(b.chiO_base, from_integer(surface.chi_O) / Rational(2));
  return v_series_in_w(in_v, setup.rho, r) * rank_prefactor(setup.rho, surface.chi_O);
}

Series exp_linear(const CycNum& coeff, const CycContextPtr& ctx, int order) {
  // exp(coeff z)
  std::vector<CycNum> c;
  CycNum term(ctx, Rational(1));
  for (int n = 0; n <= order; ++n) {
    c.push_back(term);
    term = term * coeff * ratio(1, n + 1);
  }
  Series out = Series::constant(CycNum(ctx), order);
  for (int n = 0; n <= order; ++n) out[n] = c[static_cast<std::size_t>(n)];
  return out;
}

}  // namespace

void SurfaceData::validate() const {
  const std::size_t n = classes.size();
  if (gram.size() != n) throw ConfigError("gram matrix must have one row per basic class");
  for (std::size_t i = 0; i < n; ++i) {
    if (gram[i].size() != n) throw ConfigError("gram matrix must be square");
    if (gram[i][i] != classes[i].self_sq) {
      throw ConfigError("gram diagonal entry " + std::to_string(i) + " differs from self_sq");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (gram[i][j] != gram[j][i]) throw ConfigError("gram matrix must be symmetric");
    }
    const auto role = classes[i].role;
    if (role == ClassRole::general) continue;
    const long long square = role == ClassRole::zero ? 0 : K2;
    if (classes[i].self_sq != square || classes[i].pair_K != square) {
      throw ConfigError("basic class " + std::to_string(i) + " (" + to_string(role) + ") needs a.K = a^2 = " +
                        std::to_string(square));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const long long expected = role == ClassRole::zero ? 0 : classes[j].pair_K;
      if (gram[i][j] != expected) {
        throw ConfigError("gram row " + std::to_string(i) + " (" + to_string(role) + ") must equal " +
                          (role == ClassRole::zero ? std::string("0") : std::string("the pair_K entries")));
      }
    }
  }
}

std::string to_string(ClassRole role) {
  switch (role) {
    case ClassRole::zero: return "zero";
    case ClassRole::canonical: return "canonical";
    case ClassRole::general: break;
  }
  return "general";
}

ClassRole parse_class_role(const std::string& text) {
  if (text == "general") return ClassRole::general;
  if (text == "zero") return ClassRole::zero;
  if (text == "canonical") return ClassRole::canonical;
  throw ConfigError("unknown basic class role '" + text + "' (expected general, zero or canonical)");
}

bool SurfaceData::canonical_pairing() const {
  for (const auto& c : classes) {
    if (c.pair_K != c.self_sq) return false;
  }
  return true;
}

SurfaceData canonical_surface(long long chi_O, long long K2) {
  SurfaceData s;
  s.chi_O = chi_O;
  s.K2 = K2;
  s.classes = {BasicClass{1, 0, 0, ClassRole::zero},
               BasicClass{chi_O % 2 == 0 ? 1 : -1, K2, K2, ClassRole::canonical}};
  s.gram = {{0, 0}, {0, K2}};
  return s;
}

bool AlphaData::is_zero() const {
  if (rank != 0) return false;
  for (const auto* q : {&c1a_sq, &c1a_K, &c1a_L, &c2a}) {
    if (!vb::is_zero(*q)) return false;
  }
  for (const auto& q : c1a_a) {
    if (!vb::is_zero(q)) return false;
  }
  return true;
}

void Setup::validate(const SurfaceData& surface) const {
  if (rho < 1) throw ConfigError("rho must be positive");
  const std::size_t n = surface.classes.size();
  check_class_list(c1_pair, n, "c1_pair");
  check_class_list(line.L_a, n, "L_a");
  check_class_list(alpha.c1a_a, n, "c1a_a");
  if (line.chi_L && is_integer(line.L2) && is_integer(line.LK)) {
    const Rational expected = (line.L2 - line.LK) / Rational(2) + from_integer(surface.chi_O);
    if (is_integer(expected) && from_integer(*line.chi_L) != expected) {
      throw ConfigError("chi_L = " + std::to_string(*line.chi_L) + " but L(L-K)/2 + chi(O) = " + to_string(expected));
    }
  }
}

long long Setup::chi_L(const SurfaceData& surface) const {
  if (line.chi_L) return *line.chi_L;
  const Rational value = (line.L2 - line.LK) / Rational(2) + from_integer(surface.chi_O);
  if (!is_integer(value) || !value.get_num().fits_slong_p()) {
    throw ConfigError("chi_L is required: L(L-K)/2 + chi(O) = " + to_string(value) + " is not an integer");
  }
  return value.get_num().get_si();
}

Setup resolve_pairings(const Setup& setup, const SurfaceData& surface) {
  Setup out = setup;
  const std::size_t n = surface.classes.size();
  auto fill = [&](auto& list, const auto& canonical_value, const char* what, bool zero_default) {
    using Value = std::decay_t<decltype(canonical_value)>;
    if (!list.empty()) return;
    for (std::size_t i = 0; i < n; ++i) {
      switch (surface.classes[i].role) {
        case ClassRole::zero: list.push_back(Value(0)); break;
        case ClassRole::canonical: list.push_back(canonical_value); break;
        case ClassRole::general:
          if (!zero_default) {
            throw ConfigError(std::string("missing pairing data: ") + what + " for basic class " + std::to_string(i));
          }
          list.push_back(Value(0));
      }
    }
  };
  fill(out.c1_pair, setup.c1_K, "c1_pair", false);
  fill(out.line.L_a, setup.line.LK, "L_a", false);
  fill(out.alpha.c1a_a, setup.alpha.c1a_K, "c1a_a", setup.alpha.is_zero());
  out.validate(surface);
  return out;
}

Setup canonical_setup(const Setup& setup, const SurfaceData& surface) {
  Setup out = setup;
  out.c1_pair.clear();
  out.line.L_a.clear();
  out.alpha.c1a_a.clear();
  out = resolve_pairings(out, surface);
  if (!out.line.chi_L) {
    const Rational value = (setup.line.L2 - setup.line.LK) / Rational(2) + from_integer(surface.chi_O);
    if (is_integer(value)) out.line.chi_L = value.get_num().get_si();
  }
  return out;
}

long long vd(int rho, long long c1_sq, long long c2, long long chi_O) {
  const long long r = rho;
  return 2 * r * c2 - (r - 1) * c1_sq - (r * r - 1) * chi_O;
}

Series assemble_phi(const SurfaceData& surface, const Setup& raw_setup, const Family& family, int order) {
  surface.validate();
  const Setup setup = resolve_pairings(raw_setup, surface);
  check_family(family, FamilyKind::segre, setup.rho, order);
  if (family.parameter != setup.alpha.rank) throw DomainError("Segre family parameter differs from the rank of alpha");
  const auto ctx = cyc_context(setup.rho);
  const std::size_t n = surface.classes.size();

  const IndexedParts Y = decompose_J(family.base, AssembleMode::multiplicative);
  const PairParts Z = decompose_pairs(family.weight);
  const IndexedParts S = decompose_J(family.linear, AssembleMode::additive);

  TupleSum sum{Y.per_index, class_rationals(setup.alpha.c1a_a, n), S.per_index, class_rationals(setup.line.L_a, n),
               Z.pairs};
  Series result = segre_prefactor(surface, setup, order).truncated(order) *
                  pow(Y.base.truncated(order), setup.alpha.c1a_K) * pow_int(Z.base.truncated(order), surface.K2) *
                  exp(S.base.truncated(order) * setup.line.LK);
  return result * sum.evaluate(surface, setup, ctx, order);
}

Series assemble_psi(const SurfaceData& surface, const Setup& raw_setup, const Family& family, int order) {
  surface.validate();
  const Setup setup = resolve_pairings(raw_setup, surface);
  check_family(family, FamilyKind::verlinde, setup.rho, order);
  const auto ctx = cyc_context(setup.rho);
  const std::size_t n = surface.classes.size();

  const IndexedParts A = decompose_J(family.base, AssembleMode::multiplicative);
  const PairParts B = decompose_pairs(family.weight);

  TupleSum sum{A.per_index, class_rationals(setup.line.L_a, n), {}, {}, B.pairs};
  Series result = verlinde_prefactor(surface, setup, Rational(family.parameter), order).truncated(order) *
                  pow(A.base.truncated(order), setup.line.LK) * pow_int(B.base.truncated(order), surface.K2);
  return result * sum.evaluate(surface, setup, ctx, order);
}

Series assemble_phi_canonical(long long chi_O, long long K2, const Setup& setup, const Family& family, int order) {
  const SurfaceData surface = canonical_surface(chi_O, K2);
  check_family(family, FamilyKind::segre, setup.rho, order);
  if (family.parameter != setup.alpha.rank) throw DomainError("Segre family parameter differs from the rank of alpha");
  const auto ctx = cyc_context(setup.rho);
  Series total = Series::constant(CycNum(ctx), order);
  for (SubsetMask J = 0; J < subset_count(setup.rho); ++J) {
    CycNum scalar = epsilon_power(ctx, static_cast<long long>(subset_norm(J)) * setup.c1_K) *
                    Rational((subset_size(J) * chi_O) % 2 == 0 ? 1L : -1L);
    total += pow(family.base[J].truncated(order), setup.alpha.c1a_K) *
             pow_int(family.weight[J].truncated(order), K2) * exp(family.linear[J].truncated(order) * setup.line.LK) *
             scalar;
  }
  return segre_prefactor(surface, setup, order).truncated(order) * total;
}

Series assemble_psi_canonical(long long chi_O, long long K2, const Setup& setup, const Family& family, int order) {
  const SurfaceData surface = canonical_surface(chi_O, K2);
  check_family(family, FamilyKind::verlinde, setup.rho, order);
  const auto ctx = cyc_context(setup.rho);
  Series total = Series::constant(CycNum(ctx), order);
  for (SubsetMask J = 0; J < subset_count(setup.rho); ++J) {
    CycNum scalar = epsilon_power(ctx, static_cast<long long>(subset_norm(J)) * setup.c1_K) *
                    Rational((subset_size(J) * chi_O) % 2 == 0 ? 1L : -1L);
    total += pow(family.base[J].truncated(order), setup.line.LK) * pow_int(family.weight[J].truncated(order), K2) *
             scalar;
  }
  return verlinde_prefactor(surface, setup, Rational(family.parameter), order).truncated(order) * total;
}

InvariantResult extract(const Series& series, long long vd) {
  InvariantResult out;
  out.vd = vd;
  out.series = series;
  const auto& ctx = series[0].context();
  if (vd < 0) {
    out.value = CycNum(ctx);
    return out;
  }
  if (vd > series.order()) {
    throw DomainError("virtual dimension " + std::to_string(vd) + " exceeds the series order " +
                      std::to_string(series.order()));
  }
  out.value = series[static_cast<int>(vd)];
  if (!(out.value == out.value.conjugate())) {
    throw DomainError("invariant " + to_string(out.value) + " is not real");
  }
  return out;
}

InvariantResult verlinde_number(const SurfaceData& surface, const Setup& setup, int r, long long c2, int order) {
  const long long dim = vd(setup.rho, setup.c1_sq, c2, surface.chi_O);
  const Series psi = assemble_psi(surface, setup, family_verlinde(setup.rho, r, order), order);
  InvariantResult out = extract(psi, dim);
  out.pipelines = {"verlinde"};
  bool integral_input = is_integer(setup.line.L2) && is_integer(setup.line.LK);
  for (const auto& q : setup.line.L_a) integral_input = integral_input && is_integer(q);
  if (integral_input && !(out.value.is_rational() && is_integer(out.value.rational_part()))) {
    throw std::logic_error("Verlinde number " + to_string(out.value) + " is not an integer");
  }
  return out;
}

InvariantResult segre_number(const SurfaceData& surface, const Setup& setup, long long c2, int order) {
  const long long dim = vd(setup.rho, setup.c1_sq, c2, surface.chi_O);
  const Series phi = assemble_phi(surface, setup, family_segre(setup.rho, setup.alpha.rank, order), order);
  InvariantResult out = extract(phi, dim);
  out.pipelines = {"segre"};
  return out;
}

Series donaldson_direct(const SurfaceData& surface, const Setup& raw_setup, int order) {
  surface.validate();
  const Setup setup = resolve_pairings(raw_setup, surface);
  const int rho = setup.rho;
  const auto ctx = cyc_context(rho);
  const ConstantTable& table = beta_table(rho);
  const std::size_t classes = surface.classes.size();
  const int slots = rho - 1;

  std::vector<CycNum> sines(static_cast<std::size_t>(rho));
  for (int j = 1; j < rho; ++j) sines[j] = sine_of(ctx, j);

  // sum over tuples of the scalar weight and the coefficient of z in the exponent
  Series total = Series::constant(CycNum(ctx), order);
  std::vector<std::size_t> chosen(static_cast<std::size_t>(slots));
  std::function<void(int, const CycNum&, const CycNum&)> walk = [&](int j, const CycNum& weight,
                                                                    const CycNum& slope) {
    if (j > slots) {
      total += exp_linear(slope, ctx, order) * weight;
      return;
    }
    for (std::size_t a = 0; a < classes; ++a) {
      const auto& cls = surface.classes[a];
      if (cls.sw == 0) continue;
      chosen[j - 1] = a;
      CycNum w = weight * epsilon_power(ctx, static_cast<long long>(j) * class_entry(setup.c1_pair, a)) *
                 from_integer(cls.sw);
      for (int i = 1; i < j; ++i) {
        // (1/2) at_i (at_j - at_i) with at = 2a - K
        const std::size_t b = chosen[i - 1];
        const long long e = 2 * surface.gram[b][a] - 2 * surface.classes[b].self_sq - cls.pair_K +
                            surface.classes[b].pair_K;
        w = w * table.beta_pair[i][j].pow(e);
      }
      const Rational tilde_L = Rational(2) * class_entry(setup.line.L_a, a) - setup.line.LK;
      walk(j + 1, w, slope - sines[j] * tilde_L);
    }
  };
  walk(1, CycNum(ctx, Rational(1)), CycNum(ctx));

  Series gauss = Series::monomial(CycNum(ctx, setup.line.L2 / Rational(2) + Rational(rho) * setup.point_weight), 2, order);
  CycNum front = table.B_full.pow(surface.K2) * rank_prefactor(rho, surface.chi_O);
  return exp(gauss) * total * front;
}

InvariantResult donaldson(const SurfaceData& surface, const Setup& setup, long long c2, int order) {
  if (!setup.alpha.is_zero()) throw DomainError("Donaldson invariants use alpha = 0");
  const long long dim = vd(setup.rho, setup.c1_sq, c2, surface.chi_O);
  if (dim > order) {
    throw DomainError("virtual dimension " + std::to_string(dim) + " exceeds the order " + std::to_string(order));
  }
  const Family family = family_segre(setup.rho, 0, order);
  const Series phi = assemble_phi(surface, setup, family, order);
  std::vector<std::string> pipelines{"segre"};
  if (surface.canonical_pairing()) {
    if (!(donaldson_direct(surface, setup, order) == phi)) {
      throw std::logic_error("Donaldson series from the Segre form and the direct form disagree");
    }
    pipelines.emplace_back("direct");
  }
  InvariantResult out = extract(phi, dim);
  out.pipelines = std::move(pipelines);
  return out;
}

InvariantResult fourmanifold_donaldson(long long sigma, long long euler, const std::vector<BasicClass>& classes,
                                       const std::vector<std::vector<long long>>& gram, const Setup& setup,
                                       long long c2, int order, bool twist) {
  if ((sigma + euler) % 4 != 0) throw DomainError("sigma + e must be divisible by 4");
  SurfaceData surface;
  surface.chi_O = (sigma + euler) / 4;
  surface.K2 = 3 * sigma + 2 * euler;
  surface.classes = classes;
  surface.gram = gram;
  InvariantResult out = donaldson(surface, setup, c2, order);
  if (twist) {
    const long long diff = setup.c1_sq - setup.c1_K;
    if (diff % 2 != 0) throw DomainError("c1^2 - c1.K must be even");
    if (((setup.rho - 1) * (diff / 2)) % 2 != 0) {
      out.value = -out.value;
      if (out.series) *out.series = -*out.series;
    }
  }
  return out;
}

}  // namespace vb
