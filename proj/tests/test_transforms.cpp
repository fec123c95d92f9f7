#include "doctest.h"
#include "virtblow/blowup.hpp"
#include "virtblow/transforms.hpp"
#include "virtblow/universal.hpp"

using namespace vb;

namespace {

Series identity_series(int rho, int n) { return variable(CycNum(cyc_context(rho), Rational(1)), n); }

Series one_plus_square(int rho, int n) {
  Series s = Series::constant(CycNum(cyc_context(rho), Rational(1)), n);
  if (n >= 2) s[2] = CycNum(cyc_context(rho), Rational(1));
  return s;
}

bool same_family(const Family& a, const Family& b) {
  return a.kind == b.kind && a.rho == b.rho && a.parameter == b.parameter && a.base == b.base &&
         a.weight == b.weight && a.linear == b.linear;
}

// sum_J eps^{l ||J||} A_J^a B_J^{-1}, computed directly.
Series phased_sum(const Family& f, int l, const Rational& a) {
  auto ctx = cyc_context(f.rho);
  Series sum = Series::constant(CycNum(ctx), f.order());
  for (SubsetMask J = 0; J < subset_count(f.rho); ++J) {
    sum += pow(f.base[J], a) * inverse(f.weight[J]) * CycNum::root_power(ctx, 4LL * l * subset_norm(J));
  }
  return sum;
}

Family corrupt(Family f, SubsetMask J, int k, const CycNum& delta) {
  f.base[J][k] += delta;
  return f;
}

}  // namespace

TEST_CASE("variable changes: trivial cases") {
  const int n = 12;
  for (int rho = 1; rho <= 5; ++rho) {
    const Series id = identity_series(rho, n);
    CHECK(var_chain(rho, Rational(rho), Rational(0), n).w_of_v == id);
    CHECK(var_chain(rho, Rational(-rho), Rational(0), n).w_of_v == id);
    CHECK(var_chain(rho, Rational(0), Rational(rho), n).z_of_t == id);
    CHECK(var_chain(rho, Rational(0), Rational(0), n).v_of_t == id);
  }
}

TEST_CASE("variable changes invert") {
  const int n = 16;
  for (int rho = 1; rho <= 5; ++rho) {
    const Series id = identity_series(rho, n);
    for (int s : {0, rho, 2 * rho, 1}) {
      for (int r : {-rho, 0, rho, 1}) {
        VarChain c = var_chain(rho, Rational(r), Rational(s), n);
        CHECK(compose(c.t_of_z, c.z_of_t) == id);
        CHECK(compose(c.z_of_t, c.t_of_z) == id);
        CHECK(compose(c.v_of_w, c.w_of_v) == id);
      }
    }
  }
}

TEST_CASE("s = 2 rho: the combined change is w = z and W = (1+z^2)^{(1-rho)/2}") {
  const int n = 14;
  for (int rho = 1; rho <= 5; ++rho) {
    VarChain c = var_chain(rho, Rational(rho), Rational(2 * rho), n);
    // w(z) = w_of_v(v_of_t(t_of_z(z)))
    CHECK(compose(c.w_of_v, compose(c.v_of_t, c.t_of_z)) == identity_series(rho, n));
    const Series lift = t_series_in_z(basics(rho, Rational(2 * rho), n).c1a_sq_base, rho, Rational(2 * rho));
    CHECK(lift == pow_rational(one_plus_square(rho, n), Rational(1 - rho) / Rational(2)));
  }
}

TEST_CASE("Segre-Verlinde correspondence on the closed forms") {
  const int n = 14;
  for (int rho = 1; rho <= 4; ++rho) {
    for (int s : {0, rho, 2 * rho}) {
      const Family image = segre_verlinde(family_segre(rho, s, n));
      CHECK(same_family(image, family_verlinde(rho, s - rho, n)));
    }
  }
}

TEST_CASE("Serre duality maps r = -rho to r = rho and is an involution") {
  const int n = 16;
  for (int rho = 1; rho <= 5; ++rho) {
    const Family minus = family_verlinde(rho, -rho, n);
    const Family plus = family_verlinde(rho, rho, n);
    CHECK(same_family(serre_dual(minus), plus));
    CHECK(same_family(serre_dual(plus), minus));
    const Family zero = family_verlinde(rho, 0, n);
    CHECK(same_family(serre_dual(zero), zero));
    CHECK(same_family(serre_dual(serre_dual(zero)), zero));
  }
}

TEST_CASE("r = 0: 1 + v^2 = 1/(1 - w^2)") {
  for (int rho = 1; rho <= 4; ++rho) {
    Series one_minus = Series::constant(CycNum(cyc_context(rho), Rational(1)), 12);
    one_minus[2] = CycNum(cyc_context(rho), Rational(-1));
    CHECK(one_plus_v2_in_w(rho, Rational(0), 12) == inverse(one_minus));
  }
}

TEST_CASE("Serre duality sends the exponent a to -rho - a in the relation sums") {
  // Holds for any family, so it is checked on corrupted ones.
  const int n = 12;
  for (int rho = 2; rho <= 4; ++rho) {
    auto ctx = cyc_context(rho);
    for (int r : {-rho, 0}) {
      const Family f = corrupt(family_verlinde(rho, r, n), subset_count(rho) - 1, 3, CycNum(ctx, ratio(1, 7)));
      const Family dual = serre_dual(f);
      const Series one_plus_v2 = one_plus_v2_in_w(rho, Rational(r), n);
      for (int l = 0; l < rho; ++l) {
        for (int a = -rho; a <= 0; ++a) {
          const Rational factor_exp = Rational(a * (1 - rho)) - ratio(rho * (rho - 1), 2);
          CHECK(phased_sum(dual, l, Rational(a)) ==
                pow(one_plus_v2, factor_exp) * negate_variable(phased_sum(f, l, Rational(-rho - a))));
        }
      }
    }
  }
}

TEST_CASE("transformed families pass the relations") {
  const int n = 12;
  for (int rho = 2; rho <= 4; ++rho) {
    const Family dual = serre_dual(family_verlinde(rho, 0, n));
    CHECK_FALSE(convention_scan(dual, verlinde_relations(rho, 0)).warning);
    for (int s : {0, rho, 2 * rho}) {
      const Family image = segre_verlinde(family_segre(rho, s, n));
      CHECK_FALSE(convention_scan(image, verlinde_relations(rho, s - rho)).warning);
    }
  }
}

TEST_CASE("Segre-Verlinde maps plain Segre sums to plain Verlinde sums") {
  // sum_J A_J^a / B_J = W^a sum_J Y_J^a / Z_J after the change of variables,
  // checked on a corrupted Segre family, and the right-hand sides agree.
  const int n = 12;
  for (int rho = 2; rho <= 4; ++rho) {
    auto ctx = cyc_context(rho);
    for (int s : {0, rho, 2 * rho}) {
      Family f = family_segre(rho, s, n);
      f.base[1][2] += CycNum(ctx, ratio(2, 3));
      f.weight[0][4] += CycNum(ctx, ratio(-1, 5));
      const Family image = segre_verlinde(f);
      const Rational r(s - rho);
      const Series lift = t_series_in_z(basics(rho, Rational(s), n).c1a_sq_base, rho, Rational(s));
      VarChain c = var_chain(rho, r, Rational(s), n);
      // z as a series in w
      const Series z_of_w = compose(c.z_of_t, compose(revert(c.v_of_t), c.v_of_w));
      for (int a = -rho; a <= 0; ++a) {
        const Series segre_side = pow(lift, Rational(a)) * phased_sum(f, 0, Rational(a));
        CHECK(compose(segre_side, z_of_w) == phased_sum(image, 0, Rational(a)));
        const RelationId sid = RelationId::segre_plain(a);
        const RelationId vid = RelationId::verlinde_plain(a);
        const Series rhs_s = pow(lift, Rational(a)) * relation_rhs(sid, rho, s, n);
        CHECK(compose(rhs_s, z_of_w) == relation_rhs(vid, rho, s - rho, n));
      }
    }
  }
}
