#include "virtblow/universal.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "virtblow/errors.hpp"
#include "virtblow/transforms.hpp"

namespace vb {

namespace {

Series constant(const CycContextPtr&, const CycNum& c, int n) { return Series::constant(c, n); }

Series constant(const CycContextPtr& ctx, const Rational& q, int n) {
  return Series::constant(CycNum(ctx, q), n);
}

// c0 + c1 x
Series linear_poly(const CycContextPtr& ctx, const CycNum& c0, const CycNum& c1, int n) {
  Series s = constant(ctx, c0, n);
  if (n >= 1) s[1] = c1;
  return s;
}

// 1 + k x^2
Series one_plus_sq(const CycContextPtr& ctx, const CycNum& k, int n) {
  Series s = constant(ctx, Rational(1), n);
  if (n >= 2) s[2] = k;
  return s;
}

Series one_plus_sq(const CycContextPtr& ctx, const Rational& k, int n) {
  return one_plus_sq(ctx, CycNum(ctx, k), n);
}

CycNum xi_pow(const CycContextPtr& ctx, long long k) { return CycNum::root_power(ctx, k); }

Rational binom2(int n) { return Rational(n * (n - 1) / 2); }

void check(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("constant table identity failed: ") + what);
}

std::unique_ptr<ConstantTable> build_table(int rho) {
  auto t = std::make_unique<ConstantTable>();
  t->rho = rho;
  t->ctx = cyc_context(rho);
  const auto& ctx = t->ctx;
  const auto m = static_cast<std::size_t>(rho);
  t->beta_pair.assign(m, std::vector<CycNum>(m, CycNum(ctx)));
  t->B_pair.assign(m, std::vector<CycNum>(m, CycNum(ctx)));
  for (int i = 1; i < rho; ++i) {
    for (int j = i + 1; j < rho; ++j) {
      CycNum num = xi_pow(ctx, i + j) - xi_pow(ctx, -(i + j));
      CycNum den = xi_pow(ctx, j - i) - xi_pow(ctx, i - j);
      CycNum b = num / den;
      t->beta_pair[i][j] = b;
      t->beta_pair[j][i] = b;
      t->B_pair[i][j] = b * b;
      t->B_pair[j][i] = b * b;
    }
  }
  for (int i = 1; i < rho; ++i) {
    CycNum prod(ctx, Rational(1));
    for (int j = 1; j < rho; ++j) {
      if (j != i) prod *= t->beta_pair[i][j];
    }
    t->B_pair[i][i] = prod.inverse();
  }
  const SubsetMask count = subset_count(rho);
  t->B_full = CycNum(ctx);
  for (SubsetMask J = 0; J < count; ++J) {
    CycNum prod(ctx, Rational(1));
    for (int i = 1; i < rho; ++i) {
      if (!contains(J, i)) continue;
      for (int j = 1; j < rho; ++j) {
        if (!contains(J, j)) prod *= t->beta_pair[i][j];
      }
    }
    t->beta_J.push_back(prod);
    t->B_full += prod;
  }
  for (SubsetMask J = 0; J < count; ++J) t->B_J.push_back(t->B_full / t->beta_J[J]);

  // identities
  for (SubsetMask J = 0; J < count; ++J) {
    check(t->beta_J[J] * t->B_J[J] == t->B_full, "beta_J * B_J = B");
    // pairwise decomposition of B_J through B_{ij}
    CycNum pair_prod = t->B_J[0];
    for (int i = 1; i < rho; ++i) {
      for (int j = i; j < rho; ++j) {
        if (contains(J, i) && contains(J, j)) pair_prod *= t->B_pair[i][j];
      }
    }
    check(pair_prod == t->B_J[J], "B_J = B_{} prod B_ij");
  }
  for (int i = 1; i < rho; ++i) {
    for (int j = 1; j < rho; ++j) {
      if (i == j) continue;
      const CycNum& b = t->beta_pair[i][j];
      check(b == t->beta_pair[j][i], "beta symmetric");
      check(b.conjugate() == b, "beta real");
      auto z = b.embed();
      check(z.real() > 0 && std::abs(z.imag()) < 1e-9, "beta positive");
    }
  }
  check(t->B_full.conjugate() == t->B_full, "B real");
  return t;
}

Series sqrt_unit(const Series& f) { return pow_rational(f, ratio(1, 2)); }

// c_i = (xi^{rho-2i} + xi^{2i-rho}) / 2, d_i = (xi^{rho-2i} - xi^{2i-rho}) / 2
CycNum half_sum(const CycContextPtr& ctx, int rho, int i) {
  return (xi_pow(ctx, rho - 2 * i) + xi_pow(ctx, 2 * i - rho)) * ratio(1, 2);
}
CycNum half_diff(const CycContextPtr& ctx, int rho, int i) {
  return (xi_pow(ctx, rho - 2 * i) - xi_pow(ctx, 2 * i - rho)) * ratio(1, 2);
}

// g_ij = (c_j g_{i,rho-i} + c_i g_{j,rho-j}) / (c_i + c_j), with g_{i,rho-i} the
// given edge series; 1-based and symmetric, diagonal left empty.
std::vector<std::vector<Series>> convex_grid(int rho, const CycContextPtr& ctx, const std::vector<Series>& edge) {
  const auto m = static_cast<std::size_t>(rho);
  std::vector<std::vector<Series>> g(m, std::vector<Series>(m));
  for (int i = 1; i < rho; ++i) {
    for (int j = 1; j < rho; ++j) {
      if (i == j) continue;
      if (j == rho - i) {
        g[i][j] = edge[static_cast<std::size_t>(i - 1)];
      } else {
        CycNum ci = half_sum(ctx, rho, i), cj = half_sum(ctx, rho, j);
        g[i][j] = (edge[static_cast<std::size_t>(i - 1)] * cj + edge[static_cast<std::size_t>(j - 1)] * ci) *
                  (ci + cj).inverse();
      }
    }
  }
  return g;
}

// Shared shape of the r = 0 and s = rho families:
// g_J = prod_{i in J, j notin J} g_ij * (prod_{i in J} P_i)^{rho/2}.
std::vector<Series> convex_products(int rho, const CycContextPtr& ctx, const std::vector<Series>& edge,
                                    const std::vector<Series>& per_index, int n) {
  const auto g = convex_grid(rho, ctx, edge);
  std::vector<Series> out;
  for (SubsetMask J = 0; J < subset_count(rho); ++J) {
    Series prod = constant(ctx, Rational(1), n);
    Series pa = constant(ctx, Rational(1), n);
    for (int i = 1; i < rho; ++i) {
      if (!contains(J, i)) continue;
      pa = pa * per_index[static_cast<std::size_t>(i - 1)];
      for (int j = 1; j < rho; ++j) {
        if (!contains(J, j)) prod = prod * g[i][j];
      }
    }
    out.push_back(prod * pow(pa, ratio(rho, 2)));
  }
  return out;
}

Series gamma_edge(const CycContextPtr& ctx, int rho, int i, int n) {
  CycNum d = half_diff(ctx, rho, i);
  Series w2 = Series::monomial(CycNum(ctx, Rational(1)), 2, n);
  return sqrt_unit(one_plus_sq(ctx, d * d, n) * inverse(constant(ctx, Rational(1), n) - w2));
}

}  // namespace

BasicSeries basics(int rho, const Rational& p, int order) {
  if (rho < 1) throw DomainError("rho must be positive");
  auto ctx = cyc_context(rho);
  BasicSeries b;
  b.rho = rho;
  b.param = p;
  const Rational e1 = 1 - p / rho;
  const Rational e2 = 2 - p / rho;
  Series P1 = one_plus_sq(ctx, e1, order);
  Series P2 = one_plus_sq(ctx, e2, order);
  Series P12 = one_plus_sq(ctx, e1 * e2, order);
  Series t2 = Series::monomial(CycNum(ctx, Rational(1)), 2, order);
  b.c2a_base = pow(P1, rho - p) * pow(P2, p);
  b.c1a_sq_base = pow(P1, (p - rho - 1) / 2) * pow(P2, (1 - p) / 2);
  b.chi_base = pow(P1, (p * p - (rho + ratio(1, rho)) * p) / 2) * pow(P2, (1 - p * p) / 2) *
        pow(P12, ratio(-1, 2));
  b.L2_exponent = t2 * P1 * ratio(1, 2);
  b.c1aL_exponent = t2;
  b.u_exponent = t2 * one_plus_sq(ctx, e1 * e2 / 2, order) * Rational(rho);
  const Rational k = p * p / (rho * rho);
  Series one_plus_sq1 = one_plus_sq(ctx, Rational(1), order);
  b.chiL_base = one_plus_sq1;
  b.chiO_base = pow(one_plus_sq1, k) * inverse(one_plus_sq(ctx, k, order));
  return b;
}

Series t_series_in_z(const Series& f, int rho, const Rational& s) {
  VarChain chain = var_chain(rho, s - rho, s, f.order());
  return compose(f, chain.t_of_z);
}

Series v_series_in_w(const Series& f, int rho, const Rational& r) {
  VarChain chain = var_chain(rho, r, r + rho, f.order());
  return compose(f, chain.v_of_w);
}

const ConstantTable& beta_table(int rho) {
  if (rho < 1) throw DomainError("rho must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<ConstantTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[rho];
  if (!slot) slot = build_table(rho);
  return *slot;
}

std::vector<std::vector<Series>> gamma_pairs(int rho, int order) {
  if (rho < 1) throw DomainError("rho must be positive");
  auto ctx = cyc_context(rho);
  std::vector<Series> edge;
  for (int i = 1; i < rho; ++i) edge.push_back(gamma_edge(ctx, rho, i, order));
  return convex_grid(rho, ctx, edge);
}

CycNum sine_of(const CycContextPtr& ctx, int j) {
  const int rho = ctx->rho();
  return (xi_pow(ctx, 2 * j - rho) + xi_pow(ctx, rho - 2 * j)) * ratio(1, 2);
}

Family family_verlinde(int rho, int r, int n) {
  if (rho < 1) throw DomainError("rho must be positive");
  if (r != -rho && r != 0 && r != rho) {
    throw DomainError("closed-form Verlinde families exist only for r in {-rho, 0, rho}; got r=" +
                      std::to_string(r));
  }
  const ConstantTable& tab = beta_table(rho);
  const auto& ctx = tab.ctx;
  const CycNum one(ctx, Rational(1));
  Family f;
  f.rho = rho;
  f.kind = FamilyKind::verlinde;
  f.parameter = r;
  const SubsetMask count = subset_count(rho);
  // xi-exponent of the linear factor for index j
  auto root_exp = [rho](SubsetMask J, int j) { return contains(J, j) ? rho - 2 * j : rho + 2 * j; };

  if (r == -rho) {
    for (SubsetMask J = 0; J < count; ++J) {
      Series prod = constant(ctx, Rational(1), n);
      for (int j = 1; j < rho; ++j) prod = prod * linear_poly(ctx, one, xi_pow(ctx, root_exp(J, j)), n);
      f.base.push_back(inverse(prod));
      f.weight.push_back(constant(ctx, tab.B_J[J], n));
    }
  } else if (r == rho) {
    Series one_plus_sq1 = one_plus_sq(ctx, Rational(1), n);
    for (SubsetMask J = 0; J < count; ++J) {
      Series prod = constant(ctx, Rational(1), n);
      for (int j = 1; j < rho; ++j) prod = prod * linear_poly(ctx, one, -xi_pow(ctx, root_exp(J, j)), n);
      f.base.push_back(pow(one_plus_sq1, Rational(1 - rho)) * prod);
      f.weight.push_back(pow(one_plus_sq1, binom2(rho)) * pow_int(prod, -rho) * tab.B_J[J]);
    }
  } else {
    Series A0 = constant(ctx, Rational(1), n);
    std::vector<Series> per_index, edge;
    for (int i = 1; i < rho; ++i) {
      CycNum c = half_sum(ctx, rho, i), d = half_diff(ctx, rho, i);
      Series rad = one_plus_sq(ctx, d * d, n);
      Series sq = sqrt_unit(rad);
      Series minus = sq - Series::monomial(c, 1, n);
      Series plus = sq + Series::monomial(c, 1, n);
      A0 = A0 * minus;
      per_index.push_back(plus * inverse(minus));
      edge.push_back(gamma_edge(ctx, rho, i, n));
    }
    std::vector<Series> gam = convex_products(rho, ctx, edge, per_index, n);
    Series B0 = constant(ctx, Rational(0), n);
    for (SubsetMask I = 0; I < count; ++I) B0 += gam[I] * tab.beta_J[I];
    f.base = assemble_J(A0, per_index, AssembleMode::multiplicative);
    for (SubsetMask J = 0; J < count; ++J) f.weight.push_back(B0 * inverse(gam[J] * tab.beta_J[J]));
  }
  return f;
}

Family family_segre(int rho, int s, int n) {
  if (rho < 1) throw DomainError("rho must be positive");
  if (s != 0 && s != rho && s != 2 * rho) {
    throw DomainError("closed-form Segre families exist only for s in {0, rho, 2 rho}; got s=" +
                      std::to_string(s));
  }
  const ConstantTable& tab = beta_table(rho);
  const auto& ctx = tab.ctx;
  const CycNum one(ctx, Rational(1));
  Family f;
  f.rho = rho;
  f.kind = FamilyKind::segre;
  f.parameter = s;
  const SubsetMask count = subset_count(rho);
  const Series x = variable(one, n);

  if (s == 0) {
    VarChain chain = var_chain(rho, Rational(-rho), Rational(0), n);
    Series one_plus_t2 = one_plus_sq(ctx, Rational(1), n);  // 1 + t^2
    Series sq = sqrt_unit(one_plus_t2);
    Series pre = pow(one_plus_t2, Rational(rho)) * pow_rational(one_plus_sq(ctx, Rational(2), n), ratio(-1, 2));
    for (SubsetMask J = 0; J < count; ++J) {
      Series prod = constant(ctx, Rational(1), n);
      CycNum lin(ctx);
      for (int j = 1; j < rho; ++j) {
        CycNum root = contains(J, j) ? xi_pow(ctx, rho - 2 * j) : xi_pow(ctx, rho + 2 * j);
        prod = prod * (sq + x * root);
        lin += contains(J, j) ? -xi_pow(ctx, rho - 2 * j) : xi_pow(ctx, 2 * j - rho);
      }
      f.base.push_back(compose(pre * inverse(prod), chain.t_of_z));
      f.weight.push_back(constant(ctx, tab.B_J[J], n));
      f.linear.push_back(x * lin);
    }
  } else if (s == 2 * rho) {
    Series one_plus_sq1 = one_plus_sq(ctx, Rational(1), n);  // 1 + z^2
    Series z2 = Series::monomial(one, 2, n);
    Series alt = constant(ctx, Rational(1), n) - pow_int(-z2, rho);  // 1 - (-z^2)^rho
    Series common = inverse(one_plus_sq1) * Rational(rho + 1) - inverse(alt) * Rational(2 * rho);
    for (SubsetMask J = 0; J < count; ++J) {
      Series prod = constant(ctx, Rational(1), n);
      Series lin = common;
      for (int j = 1; j < rho; ++j) {
        bool in = contains(J, j);
        prod = prod * linear_poly(ctx, one, -xi_pow(ctx, in ? rho - 2 * j : rho + 2 * j), n);
        lin += inverse(linear_poly(ctx, one, -xi_pow(ctx, in ? rho + 2 * j : rho - 2 * j), n));
      }
      f.base.push_back(pow(one_plus_sq1, ratio(1 - rho, 2)) * prod);
      f.weight.push_back(pow(one_plus_sq1, binom2(rho)) * pow_int(prod, -rho) * tab.B_J[J]);
      f.linear.push_back(lin);
    }
  } else {
    Series Y0 = constant(ctx, Rational(1), n);
    Series S0 = constant(ctx, Rational(0), n);
    std::vector<Series> per_index, edge, lin_index;
    for (int i = 1; i < rho; ++i) {
      CycNum c = half_sum(ctx, rho, i);
      CycNum sine_term = (xi_pow(ctx, 2 * (rho - 2 * i)) - xi_pow(ctx, 2 * (2 * i - rho))) * ratio(1, 2);
      Series sq = sqrt_unit(one_plus_sq(ctx, c * c, n));
      Series cz = x * c;
      Series z2 = Series::monomial(one, 2, n);
      Y0 = Y0 * (sq - cz);
      Series plus = sq + cz;
      per_index.push_back(plus * plus);
      edge.push_back(sq);
      S0 -= z2 * (c * c) + cz * sq;
      lin_index.push_back(cz * sq * Rational(2) - z2 * sine_term);
    }
    std::vector<Series> zeta = convex_products(rho, ctx, edge, per_index, n);
    Series Z0 = constant(ctx, Rational(0), n);
    for (SubsetMask I = 0; I < count; ++I) Z0 += zeta[I] * tab.beta_J[I];
    f.base = assemble_J(Y0, per_index, AssembleMode::multiplicative);
    for (SubsetMask J = 0; J < count; ++J) f.weight.push_back(Z0 * inverse(zeta[J] * tab.beta_J[J]));
    f.linear = assemble_J(S0, lin_index, AssembleMode::additive);
  }
  return f;
}

std::vector<Series> assemble_J(const Series& base, const std::vector<Series>& per_index,
                               AssembleMode mode) {
  const int rho = static_cast<int>(per_index.size()) + 1;
  std::vector<Series> out;
  for (SubsetMask J = 0; J < subset_count(rho); ++J) {
    Series acc = base;
    for (int j = 1; j < rho; ++j) {
      if (!contains(J, j)) continue;
      const Series& p = per_index[static_cast<std::size_t>(j - 1)];
      acc = mode == AssembleMode::multiplicative ? acc * p : acc + p;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<Series> assemble_pairs(const Series& base, const std::vector<std::vector<Series>>& pairs) {
  const int rho = static_cast<int>(pairs.size()) + 1;
  std::vector<Series> out;
  for (SubsetMask J = 0; J < subset_count(rho); ++J) {
    Series acc = base;
    for (int j = 1; j < rho; ++j) {
      for (int k = j; k < rho; ++k) {
        if (contains(J, j) && contains(J, k)) {
          acc = acc * pairs[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)];
        }
      }
    }
    out.push_back(std::move(acc));
  }
  return out;
}

IndexedParts decompose_J(const std::vector<Series>& members, AssembleMode mode) {
  IndexedParts parts;
  parts.base = members.front();
  const Series inv = mode == AssembleMode::multiplicative ? inverse(parts.base) : parts.base;
  for (std::size_t j = 0; (SubsetMask{1} << j) < members.size(); ++j) {
    const Series& single = members[SubsetMask{1} << j];
    parts.per_index.push_back(mode == AssembleMode::multiplicative ? single * inv : single - parts.base);
  }
  return parts;
}

PairParts decompose_pairs(const std::vector<Series>& members) {
  PairParts parts;
  parts.base = members.front();
  std::size_t m = 0;
  while ((SubsetMask{1} << m) < members.size()) ++m;
  parts.pairs.assign(m, std::vector<Series>(m));
  const Series inv0 = inverse(parts.base);
  std::vector<Series> inv_single;
  for (std::size_t i = 0; i < m; ++i) {
    const Series& single = members[SubsetMask{1} << i];
    parts.pairs[i][i] = single * inv0;
    inv_single.push_back(inverse(single));
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      Series p = members[(SubsetMask{1} << i) | (SubsetMask{1} << j)] * parts.base * inv_single[i] * inv_single[j];
      parts.pairs[i][j] = p;
      parts.pairs[j][i] = p;
    }
  }
  return parts;
}

}  // namespace vb
