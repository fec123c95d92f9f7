#include <cmath>
#include <string>

#include "doctest.h"
#include "virtblow/blowup.hpp"
#include "virtblow/config.hpp"
#include "virtblow/invariants.hpp"
#include "virtblow/transforms.hpp"
#include "virtblow/universal.hpp"

using namespace vb;

namespace {

SurfaceData k3_surface() {
  SurfaceData s;
  s.chi_O = 2;
  s.K2 = 0;
  s.classes = {{1, 0, 0, ClassRole::zero}};
  s.gram = {{0}};
  return s;
}

Setup k3_setup(int rho, const Rational& L2, const Rational& u) {
  Setup st;
  st.rho = rho;
  st.line.L2 = L2;
  st.point_weight = u;
  return st;
}

Series monomial(int rho, const Rational& c, int power, int order) {
  Series s = Series::constant(CycNum(cyc_context(rho)), order);
  if (power <= order) s[power] = CycNum(cyc_context(rho), c);
  return s;
}

Series one(int rho, int order) { return Series::constant(CycNum(cyc_context(rho), Rational(1)), order); }

bool is_real(const CycNum& v) { return v == v.conjugate() && std::abs(v.embed().imag()) < 1e-9; }

Rational binomial(long long n, long long k) {
  Rational r(1);
  for (long long i = 1; i <= k; ++i) r = r * from_integer(n - k + i) / from_integer(i);
  return r;
}

// Surface blown up at a point: pullbacks keep their data, each a + D gains
// a.K - 1 and a^2 - 1; only (a_i + D).(a_j + D) changes, by -1.
SurfaceData blow_up(const SurfaceData& s) {
  SurfaceData b;
  b.chi_O = s.chi_O;
  b.K2 = s.K2 - 1;
  const std::size_t n = s.classes.size();
  for (auto c : s.classes) {
    c.role = ClassRole::general;
    b.classes.push_back(c);
  }
  for (const auto& c : s.classes) b.classes.push_back({c.sw, c.pair_K - 1, c.self_sq - 1, ClassRole::general});
  b.gram.assign(2 * n, std::vector<long long>(2 * n));
  for (std::size_t i = 0; i < 2 * n; ++i) {
    for (std::size_t j = 0; j < 2 * n; ++j) b.gram[i][j] = s.gram[i % n][j % n] - (i >= n && j >= n ? 1 : 0);
  }
  return b;
}

// Setup on the blowup for c1 - l D and L - m D; `base` must have resolved pairings.
Setup blown_setup(const Setup& base, int l, int m) {
  Setup b = base;
  const std::size_t n = base.c1_pair.size();
  b.c1_sq = base.c1_sq - l * l;
  b.c1_K = base.c1_K + l;
  for (std::size_t i = 0; i < n; ++i) b.c1_pair.push_back(base.c1_pair[i] + l);
  b.line.L2 = base.line.L2 - Rational(m * m);
  b.line.LK = base.line.LK + Rational(m);
  for (std::size_t i = 0; i < n; ++i) b.line.L_a.push_back(base.line.L_a[i] + Rational(m));
  b.line.chi_L.reset();
  if (b.alpha.is_zero()) b.alpha.c1a_a.clear();
  return b;
}

// alpha + k O_D(D) on top of blown_setup.
void twist_alpha(Setup& b, const Setup& base, int k, int x) {
  const std::size_t n = base.alpha.c1a_a.size();
  b.alpha.c1a_sq = base.alpha.c1a_sq - Rational(k * k);
  b.alpha.c1a_K = base.alpha.c1a_K - Rational(k);
  b.alpha.c1a_L = base.alpha.c1a_L + Rational(k * x);
  for (std::size_t i = 0; i < n; ++i) b.alpha.c1a_a.push_back(base.alpha.c1a_a[i] - Rational(k));
  b.alpha.c2a = base.alpha.c2a - Rational(k * (k - 1) / 2);
}

std::string source_path(const std::string& rel) { return std::string(VB_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST_CASE("virtual dimension") {
  for (long long c2 = 0; c2 < 6; ++c2) CHECK(vd(1, 0, c2, 1) == 2 * c2);
  CHECK(vd(2, 0, 2, 2) == 2);
  CHECK(vd(3, 1, 3, 1) == 8);
}

TEST_CASE("K3: phi is a Gaussian in z") {
  const int n = 12;
  for (int rho = 1; rho <= 4; ++rho) {
    const Rational L2(4), u = ratio(1, 3);
    const Series phi = assemble_phi(k3_surface(), k3_setup(rho, L2, u), family_segre(rho, 0, n), n);
    CHECK(phi == exp(monomial(rho, L2 / Rational(2) + Rational(rho) * u, 2, n)));
    const Series flat = assemble_phi(k3_surface(), k3_setup(rho, 0, 0), family_segre(rho, 0, n), n);
    CHECK(flat == one(rho, n));
  }
}

TEST_CASE("K3: psi at r = 0 with chi(L) = 2 is (1+v^2)^2") {
  const int n = 12;
  for (int rho = 1; rho <= 4; ++rho) {
    Setup st = k3_setup(rho, 0, 0);
    st.line.chi_L = 2;
    const Series psi = assemble_psi(k3_surface(), st, family_verlinde(rho, 0, n), n);
    const Series one_plus_v2 = one_plus_v2_in_w(rho, Rational(0), n);
    CHECK(psi == one_plus_v2 * one_plus_v2);
  }
}

TEST_CASE("rho = 1, r = -1: psi has no subset sum") {
  const int n = 10;
  const SurfaceData surf = canonical_surface(1, 3);
  Setup st;
  st.rho = 1;
  st.c1_K = 3;
  st.c1_sq = 3;
  st.line.L2 = Rational(5);
  st.line.LK = Rational(3);
  st = canonical_setup(st, surf);
  const Family fam = family_verlinde(1, -1, n);
  const BasicSeries b = basics(1, Rational(-1), n);
  const long long chi_L = st.chi_L(surf);
  const Series expected = v_series_in_w(pow(b.chiL_base, from_integer(chi_L)) * pow(b.chiO_base, ratio(1, 2)), 1, Rational(-1)) *
                          pow(fam.base[0], Rational(3)) * pow(fam.weight[0], Rational(3));
  CHECK(assemble_psi(surf, st, fam, n) == expected);
}

TEST_CASE("raising chi(L) by one multiplies psi by G") {
  const int n = 10;
  for (int rho = 2; rho <= 3; ++rho) {
    const SurfaceData surf = canonical_surface(1, 2);
    Setup st;
    st.rho = rho;
    st.c1_K = 1;
    st.c1_sq = 1;
    // non-integral L, so chi(L) is free
    st.line.L2 = ratio(7, 2);
    st.line.LK = ratio(1, 2);
    st.line.chi_L = 2;
    st = canonical_setup(st, surf);
    for (int r : {-rho, 0, rho}) {
      const Family fam = family_verlinde(rho, r, n);
      Setup up = st;
      up.line.chi_L = 3;
      CHECK(assemble_psi(surf, up, fam, n) == assemble_psi(surf, st, fam, n) * one_plus_v2_in_w(rho, Rational(r), n));
    }
  }
}

TEST_CASE("shifting u multiplies phi by exp(delta T)") {
  const int n = 10;
  for (int rho = 2; rho <= 3; ++rho) {
    const SurfaceData surf = canonical_surface(1, 2);
    for (int s : {0, rho, 2 * rho}) {
      Setup st;
      st.rho = rho;
      st.c1_K = 1;
      st.c1_sq = 1;
      st.line.L2 = Rational(3);
      st.line.LK = Rational(1);
      st.alpha.rank = s;
      st.alpha.c1a_sq = Rational(2);
      st.alpha.c1a_K = Rational(1);
      st.alpha.c1a_L = ratio(1, 2);
      st.alpha.c2a = Rational(1);
      st.point_weight = ratio(1, 5);
      st = canonical_setup(st, surf);
      const Family fam = family_segre(rho, s, n);
      const Rational delta = ratio(-2, 3);
      Setup shifted = st;
      shifted.point_weight = st.point_weight + delta;
      const Series u_exp = t_series_in_z(basics(rho, Rational(s), n).u_exponent, rho, Rational(s));
      CHECK(assemble_phi(surf, shifted, fam, n) == assemble_phi(surf, st, fam, n) * exp(u_exp * delta));
    }
  }
}

TEST_CASE("two-class forms agree with the tuple sums") {
  const int n = 8;
  for (int rho = 2; rho <= 4; ++rho) {
    const SurfaceData surf = canonical_surface(3, 2);
    Setup st;
    st.rho = rho;
    st.c1_K = 1;
    st.c1_sq = 3;
    st.line.L2 = Rational(4);
    st.line.LK = Rational(2);
    st.alpha.rank = rho;
    st.alpha.c1a_sq = Rational(1);
    st.alpha.c1a_K = Rational(-1);
    st.alpha.c1a_L = Rational(2);
    st.alpha.c2a = Rational(3);
    st.point_weight = ratio(1, 2);
    st = canonical_setup(st, surf);
    const Family seg = family_segre(rho, rho, n);
    CHECK(assemble_phi(surf, st, seg, n) == assemble_phi_canonical(3, 2, st, seg, n));
    for (int r : {-rho, 0, rho}) {
      const Family ver = family_verlinde(rho, r, n);
      CHECK(assemble_psi(surf, st, ver, n) == assemble_psi_canonical(3, 2, st, ver, n));
    }
  }
}

TEST_CASE("extraction") {
  const int rho = 2, n = 10;
  const Series gauss = exp(monomial(rho, Rational(2), 2, n));
  CHECK(extract(gauss, 2).value == CycNum(cyc_context(rho), Rational(2)));
  CHECK(extract(gauss, 3).value == CycNum(cyc_context(rho)));
  CHECK(extract(gauss, 0).value == CycNum(cyc_context(rho), Rational(1)));
  CHECK(extract(gauss, -2).value == CycNum(cyc_context(rho)));
  CHECK_THROWS_AS(extract(gauss, 11), DomainError);
  Series complex_series = one(rho, n);
  complex_series[0] = CycNum::root_power(cyc_context(rho), 1);
  CHECK_THROWS_AS(extract(complex_series, 0), DomainError);
}

TEST_CASE("Donaldson invariants") {
  SUBCASE("K3, rho = 2, L^2 = 4, u = 0") {
    const InvariantResult res = donaldson(k3_surface(), k3_setup(2, Rational(4), 0), 2, 2);
    CHECK(res.vd == 2);
    CHECK(res.value == CycNum(cyc_context(2), Rational(2)));
    CHECK(res.pipelines.size() == 2);
  }
  SUBCASE("K3 for several ranks: both routes give L^2/2 at vd = 2 for u = 0") {
    for (int rho = 1; rho <= 4; ++rho) {
      // vd = 2 rho c2 - 2(rho^2 - 1) = 2 at c2 = rho
      const InvariantResult res = donaldson(k3_surface(), k3_setup(rho, Rational(4), 0), rho, 2);
      CHECK(res.value == CycNum(cyc_context(rho), Rational(2)));
    }
  }
  SUBCASE("odd virtual dimension gives 0") {
    Setup st = k3_setup(2, Rational(4), 0);
    st.c1_sq = 1;
    const InvariantResult res = donaldson(k3_surface(), st, 2, 4);
    CHECK(res.vd % 2 != 0);
    CHECK(res.value == CycNum(cyc_context(2)));
  }
  SUBCASE("rho = 2 prefactor: 2^{2 - chi + K^2} at vd = 0") {
    SurfaceData surf;
    surf.chi_O = 1;
    surf.K2 = 3;
    surf.classes = {{1, 0, 0, ClassRole::zero}};
    surf.gram = {{0}};
    Setup st = k3_setup(2, Rational(2), 0);
    st.c1_sq = 1;
    st.c1_K = 1;
    st.line.LK = Rational(1);
    const InvariantResult res = donaldson(surf, st, 1, 0);
    CHECK(res.vd == 0);
    CHECK(res.value == CycNum(cyc_context(2), Rational(16)));
    CHECK(res.pipelines.size() == 2);
  }
  SUBCASE("surfaces with canonical divisor: both routes agree and the value is real") {
    for (int rho = 2; rho <= 3; ++rho) {
      for (long long chi : {1, 3}) {
        const SurfaceData surf = canonical_surface(chi, 2);
        Setup st;
        st.rho = rho;
        st.c1_K = 1;
        st.c1_sq = 1;
        st.line.L2 = Rational(3);
        st.line.LK = Rational(1);
        st.point_weight = ratio(1, 2);
        st = canonical_setup(st, surf);
        for (long long c2 = 0; c2 < 8; ++c2) {
          const long long d = vd(rho, st.c1_sq, c2, chi);
          if (d < 0 || d > 10) continue;
          const InvariantResult res = donaldson(surf, st, c2, 10);
          CHECK(res.pipelines.size() == 2);
          CHECK(is_real(res.value));
          CHECK(res.value.is_rational());
        }
      }
    }
  }
  SUBCASE("nonzero alpha is rejected") {
    Setup st = k3_setup(2, Rational(4), 0);
    st.alpha.c2a = Rational(1);
    CHECK_THROWS(donaldson(k3_surface(), st, 2, 2));
  }
}

TEST_CASE("Donaldson invariants from signature and Euler number") {
  SUBCASE("K3 numbers reproduce the surface computation") {
    for (int rho = 1; rho <= 3; ++rho) {
      const Setup st = k3_setup(rho, Rational(4), ratio(1, 3));
      const SurfaceData k3 = k3_surface();
      const InvariantResult four = fourmanifold_donaldson(-16, 24, k3.classes, k3.gram, st, rho, 2);
      CHECK(four.value == donaldson(k3, st, rho, 2).value);
    }
  }
  SUBCASE("twist with even exponent changes nothing") {
    Setup st = k3_setup(2, Rational(4), 0);
    st.c1_sq = 2;
    st.c1_K = 0;  // (c1^2 - c1 K)/2 = 1, times rho - 1 = 1: odd
    const SurfaceData k3 = k3_surface();
    const auto plain = fourmanifold_donaldson(-16, 24, k3.classes, k3.gram, st, 3, 4);
    const auto twisted = fourmanifold_donaldson(-16, 24, k3.classes, k3.gram, st, 3, 4, true);
    CHECK(twisted.value == -plain.value);
    st.c1_sq = 4;  // exponent 2: even
    const auto plain4 = fourmanifold_donaldson(-16, 24, k3.classes, k3.gram, st, 3, 4);
    const auto twisted4 = fourmanifold_donaldson(-16, 24, k3.classes, k3.gram, st, 3, 4, true);
    CHECK(twisted4.value == plain4.value);
  }
  SUBCASE("rho = 1 is the Hilbert scheme exponential") {
    const Rational L2(6), u = ratio(1, 2);
    const Rational c = L2 / Rational(2) + u;
    const SurfaceData k3 = k3_surface();
    for (long long c2 = 0; c2 <= 4; ++c2) {
      const auto res = fourmanifold_donaldson(-16, 24, k3.classes, k3.gram, k3_setup(1, L2, u), c2, 8);
      Rational expected(1);
      for (long long i = 1; i <= c2; ++i) expected = expected * c / from_integer(i);
      CHECK(res.value == CycNum(cyc_context(1), expected));
    }
  }
  SUBCASE("sigma + e not divisible by 4") {
    const SurfaceData k3 = k3_surface();
    CHECK_THROWS(fourmanifold_donaldson(-16, 23, k3.classes, k3.gram, k3_setup(2, Rational(4), 0), 2, 2));
  }
}

TEST_CASE("Verlinde numbers") {
  SUBCASE("K3, rank 1: binomial(chi(L) + n - 1, n)") {
    Setup st = k3_setup(1, Rational(2), 0);
    for (long long c2 = 0; c2 <= 4; ++c2) {
      const auto res = verlinde_number(k3_surface(), st, 0, c2, 10);
      CHECK(res.value == CycNum(cyc_context(1), binomial(3 + c2 - 1, c2)));
    }
  }
  SUBCASE("integer values for integral data") {
    for (int rho = 2; rho <= 3; ++rho) {
      const SurfaceData surf = canonical_surface(1, 1);
      for (int c1K : {0, 1}) {
        Setup st;
        st.rho = rho;
        st.c1_K = c1K;
        st.c1_sq = c1K;
        st.line.L2 = Rational(3);
        st.line.LK = Rational(1);
        st = canonical_setup(st, surf);
        for (int r : {-rho, 0, rho}) {
          for (long long c2 = 0; c2 < 5; ++c2) {
            const long long d = vd(rho, st.c1_sq, c2, 1);
            if (d < 0 || d > 10) continue;
            const auto res = verlinde_number(surf, st, r, c2, 10);
            REQUIRE(res.value.is_rational());
            CHECK(is_integer(res.value.rational_part()));
          }
        }
      }
    }
  }
}

TEST_CASE("blowup consistency: psi of the blowup is psi times the ratio") {
  const int n = 8;
  for (int rho = 2; rho <= 3; ++rho) {
    const SurfaceData surf = canonical_surface(1, 2);
    Setup st;
    st.rho = rho;
    st.c1_K = 1;
    st.c1_sq = 1;
    st.line.L2 = Rational(3);
    st.line.LK = Rational(1);
    st.point_weight = ratio(1, 3);
    st = canonical_setup(st, surf);
    const SurfaceData blown = blow_up(surf);
    for (int r : {-rho, 0, rho}) {
      const Family fam = family_verlinde(rho, r, n);
      const Series psi = assemble_psi(surf, st, fam, n);
      for (int l = 0; l < rho; ++l) {
        for (int m = -1; m <= 2; ++m) {
          const Series lhs = assemble_psi(blown, blown_setup(st, l, m), fam, n);
          CHECK_MESSAGE(lhs == psi * blowup_ratio(fam, l, m), "rho=" << rho << " r=" << r << " l=" << l << " m=" << m);
        }
      }
    }
  }
}

TEST_CASE("blowup consistency: phi of the blowup is phi times the ratio") {
  const int n = 8;
  for (int rho = 2; rho <= 3; ++rho) {
    const SurfaceData surf = canonical_surface(1, 2);
    Setup st;
    st.rho = rho;
    st.c1_K = 1;
    st.c1_sq = 1;
    st.line.L2 = Rational(3);
    st.line.LK = Rational(1);
    st.point_weight = ratio(1, 3);
    st.alpha.c1a_K = Rational(1);
    st.alpha.c1a_sq = Rational(2);
    st.alpha.c1a_L = Rational(1);
    st.alpha.c2a = Rational(1);
    st.alpha.c1a_a = {Rational(0), Rational(1)};
    const SurfaceData blown = blow_up(surf);
    for (int s : {0, rho, 2 * rho}) {
      Setup base = st;
      base.alpha.rank = s;
      base = canonical_setup(base, surf);
      const Family fam = family_segre(rho, s, n);
      const Series phi = assemble_phi(surf, base, fam, n);
      for (int l = 0; l < rho; ++l) {
        for (int k = -1; k <= 2; ++k) {
          for (int x = -1; x <= 1; ++x) {
            Setup b = blown_setup(base, l, x);
            twist_alpha(b, base, k, x);
            const Series lhs = assemble_phi(blown, b, fam, n);
            CHECK_MESSAGE(lhs == phi * blowup_ratio(fam, l, k, Rational(x)),
                          "rho=" << rho << " s=" << s << " l=" << l << " k=" << k << " x=" << x);
          }
        }
      }
    }
  }
}

TEST_CASE("surface data validation") {
  SurfaceData s = canonical_surface(1, 2);
  CHECK_NOTHROW(s.validate());
  CHECK(s.canonical_pairing());
  SurfaceData bad = s;
  bad.gram[0][1] = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.gram[1][1] = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.classes[1].pair_K = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  SurfaceData general;
  general.chi_O = 1;
  general.K2 = 1;
  general.classes = {{1, 0, -1, ClassRole::general}};
  general.gram = {{-1}};
  CHECK_NOTHROW(general.validate());
  CHECK_FALSE(general.canonical_pairing());
  Setup st;
  st.rho = 2;
  CHECK_THROWS_AS(resolve_pairings(st, general), ConfigError);
  Setup chi_mismatch;
  chi_mismatch.rho = 2;
  chi_mismatch.line.L2 = Rational(2);
  chi_mismatch.line.chi_L = 7;  // should be 1 + 2
  CHECK_THROWS_AS(chi_mismatch.validate(k3_surface()), ConfigError);
}

TEST_CASE("surface configs") {
  SUBCASE("shipped examples load") {
    const SurfaceConfig k3 = load_surface_config(source_path("configs/k3.yaml"));
    CHECK(k3.surface.chi_O == 2);
    CHECK(k3.surface.K2 == 0);
    REQUIRE(k3.surface.classes.size() == 1);
    CHECK(k3.surface.classes[0].role == ClassRole::zero);
    const SurfaceConfig quintic = load_surface_config(source_path("configs/quintic.yaml"));
    CHECK(quintic.surface.chi_O == 5);
    REQUIRE(quintic.setup.has_value());
    CHECK(quintic.setup->rho == 2);
    CHECK(quintic.setup->line.L2 == Rational(5));
  }
  SUBCASE("rationals and nested tables") {
    const SurfaceConfig cfg = parse_surface_config(
        "surface:\n"
        "  chi_O: 2\n"
        "  K2: 0\n"
        "  basic_classes:\n"
        "    - {sw: 1, pair_K: 0, self_sq: 0, role: zero}\n"
        "  gram: [[0]]\n"
        "setup:\n"
        "  rho: 3\n"
        "  L: {L2: \"7/2\", LK: 0}\n"
        "  u: \"-1/3\"\n");
    REQUIRE(cfg.setup.has_value());
    CHECK(cfg.setup->rho == 3);
    CHECK(cfg.setup->line.L2 == ratio(7, 2));
    CHECK(cfg.setup->point_weight == ratio(-1, 3));
  }
  SUBCASE("errors name the key") {
    auto message = [](const std::string& text) {
      try {
        parse_surface_config(text);
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    const std::string head = "surface:\n  chi_O: 2\n  K2: 0\n  gram: [[0]]\n";
    CHECK(message(head + "  basic_classes:\n    - {sw: x, pair_K: 0, self_sq: 0}\n").find("surface.basic_classes[0].sw") !=
          std::string::npos);
    CHECK(message(head + "  basic_classes:\n    - {sw: 1, pair_K: 0, self_sq: 0}\n  colour: red\n").find("colour") !=
          std::string::npos);
    CHECK_FALSE(message("surface: [1, 2]\n").empty());
    CHECK_FALSE(message("surface:\n  chi_O: 2\n  K2: 0\n  basic_classes: []\n  gram: [[0, 1]]\n").empty());
    CHECK_THROWS_AS(load_surface_config(source_path("configs/does-not-exist.yaml")), ConfigError);
  }
}
