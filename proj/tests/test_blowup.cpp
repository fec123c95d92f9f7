#include <random>

#include "doctest.h"
#include "virtblow/blowup.hpp"
#include "virtblow/universal.hpp"

using namespace vb;

namespace {

bool is_zero_series(const Series& s) { return !first_nonzero(s).has_value(); }

Series poly(int rho, std::initializer_list<long> coeffs, int order) {
  auto ctx = cyc_context(rho);
  Series s = Series::constant(CycNum(ctx), order);
  int k = 0;
  for (long c : coeffs) {
    if (k > order) break;
    s[k++] = CycNum(ctx, Rational(c));
  }
  return s;
}

Convention clean_convention(const Family& f, const std::vector<RelationId>& rels) {
  ScanResult scan = convention_scan(f, rels);
  REQUIRE_FALSE(scan.warning);
  return scan.chosen;
}

int earliest_failure(const ResidualReport& rep) {
  int best = rep.order + 1;
  for (const auto& e : rep.entries) {
    if (e.first_nonzero) best = std::min(best, *e.first_nonzero);
  }
  return best;
}

}  // namespace

TEST_CASE("relation ids print and parse") {
  for (int rho = 1; rho <= 4; ++rho) {
    for (int r : {-rho, 0, rho}) {
      for (const auto& id : verlinde_relations(rho, r)) CHECK(parse_relation(to_string(id)) == id);
    }
    for (int s : {0, rho, 2 * rho}) {
      for (const auto& id : segre_relations(rho, s)) CHECK(parse_relation(to_string(id)) == id);
    }
  }
  for (int k = 0; k < 8; ++k) {
    const Convention c = Convention::from_index(k);
    CHECK(parse_convention(to_string(c)) == c);
  }
  CHECK(Convention{}.is_identity());
  CHECK_THROWS_AS(parse_relation("nonsense(a=1)"), std::exception);
}

TEST_CASE("out-of-range relations are rejected") {
  CHECK_THROWS_AS(validate_relation(RelationId::verlinde_plain(1), FamilyKind::verlinde, 2, -2), DomainError);
  CHECK_THROWS_AS(validate_relation(RelationId::verlinde_plain(-3), FamilyKind::verlinde, 2, -2), DomainError);
  CHECK_THROWS_AS(validate_relation(RelationId::verlinde_phased(0, -1), FamilyKind::verlinde, 2, -2), DomainError);
  CHECK_THROWS_AS(validate_relation(RelationId::segre_plain(0), FamilyKind::verlinde, 2, -2), DomainError);
  CHECK_THROWS_AS(validate_relation(RelationId::segre_exp_lower(0, 4), FamilyKind::segre, 2, 0), DomainError);
  CHECK_NOTHROW(validate_relation(RelationId::verlinde_plain(-2), FamilyKind::verlinde, 2, -2));
  const Family f = family_verlinde(2, -2, 6);
  CHECK_THROWS_AS(eval_verlinde_relation(f, RelationId::verlinde_plain(1)), DomainError);
  CHECK_THROWS_AS(eval_segre_relation(f, RelationId::verlinde_plain(0)), DomainError);
}

TEST_CASE("rho = 2, r = -2: the hand-expanded relation sums") {
  const int n = 12;
  const Family f = family_verlinde(2, -2, n);
  RelationEvaluator<CycNum> ev(f);
  CHECK(ev.lhs(RelationId::verlinde_plain(-2), {}) == poly(2, {1, 0, 1}, n));
  CHECK(is_zero_series(ev.residual(RelationId::verlinde_plain(-2), {})));
  CHECK(ev.lhs(RelationId::verlinde_plain(0), {}) == poly(2, {1}, n));
  CHECK(is_zero_series(ev.residual(RelationId::verlinde_plain(0), {})));
  // a = 0 phased row: (1 - 1)/2
  CHECK(is_zero_series(ev.lhs(RelationId::verlinde_phased(1, -1), {})));
  CHECK(is_zero_series(ev.residual(RelationId::verlinde_phased(1, -1), {})));
}

TEST_CASE("Segre relation examples") {
  const int n = 12;
  for (int rho = 1; rho <= 4; ++rho) {
    const Family f = family_segre(rho, 0, n);
    CHECK(is_zero_series(eval_segre_relation(f, RelationId::segre_plain(0))));
  }
  const Family f2 = family_segre(2, 0, n);
  CHECK(is_zero_series(eval_segre_relation(f2, RelationId::segre_phased(1, 0))));
  RelationEvaluator<CycNum> ev(f2);
  CHECK(ev.lhs(RelationId::segre_phased_moment(1, 0, 0), {}) == ev.lhs(RelationId::segre_phased(1, 0), {}));
  const Family f4 = family_segre(4, 4, n);
  RelationEvaluator<CycNum> ev4(f4);
  for (int l = 1; l < 4; ++l) {
    for (int a = -l + 1; a <= -l + 3; ++a) {
      if (std::min(l * (4 - l - a), (l + a) * (4 - l)) <= 0) continue;
      CHECK(ev4.lhs(RelationId::segre_phased_moment(l, a, 0), {}) == ev4.lhs(RelationId::segre_phased(l, a), {}));
    }
  }
}

TEST_CASE("blowup ratio examples") {
  const int n = 14;
  for (int rho = 1; rho <= 4; ++rho) {
    for (int r : {-rho, 0, rho}) {
      CHECK(blowup_ratio(family_verlinde(rho, r, n), 0, 0) == poly(rho, {1}, n));
    }
    for (int s : {0, rho, 2 * rho}) {
      CHECK(blowup_ratio(family_segre(rho, s, n), 0, 0, 0) == poly(rho, {1}, n));
    }
  }
  const Family f = family_verlinde(2, -2, n);
  CHECK(is_zero_series(blowup_ratio(f, 1, 0)));
  // m = 1: w/(1 - w^4) up to the phase sign
  Series expected = poly(2, {0, 1}, n) * inverse(poly(2, {1, 0, 0, 0, -1}, n));
  const Series ratio_value = blowup_ratio(f, 1, 1);
  CHECK((ratio_value == expected || ratio_value == -expected));
}

TEST_CASE("blowup ratio is 1 across the plain relation range") {
  // For m in [-rho, 0] the plain relation makes the Verlinde ratio trivial;
  // on the Segre side the same holds for k in [0, rho] at x = 0.
  const int n = 12;
  for (int rho = 1; rho <= 4; ++rho) {
    for (int r : {-rho, 0, rho}) {
      const Family f = family_verlinde(rho, r, n);
      for (int m = -rho; m <= 0; ++m) CHECK(blowup_ratio(f, 0, m) == poly(rho, {1}, n));
    }
    for (int s : {0, rho, 2 * rho}) {
      const Family f = family_segre(rho, s, n);
      for (int k = 0; k <= rho; ++k) CHECK(blowup_ratio(f, 0, k, 0) == poly(rho, {1}, n));
    }
  }
}

TEST_CASE("convention scan") {
  const int n = 12;
  SUBCASE("rho = 2, r = -2, all relations: some convention is clean, the identity is not") {
    const Family f = family_verlinde(2, -2, n);
    ScanResult scan = convention_scan(f, verlinde_relations(2, -2));
    CHECK_FALSE(scan.warning);
    CHECK(scan.report.clean());
    CHECK_FALSE(scan.clean_conventions.empty());
    CHECK_FALSE(scan.chosen.is_identity());
    CHECK_FALSE(verify_family(f, verlinde_relations(2, -2)).clean());
  }
  SUBCASE("unphased relations only: identity") {
    for (int rho = 2; rho <= 4; ++rho) {
      std::vector<RelationId> rels;
      for (int a = -rho; a <= 0; ++a) rels.push_back(RelationId::verlinde_plain(a));
      ScanResult scan = convention_scan(family_verlinde(rho, -rho, n), rels);
      CHECK(scan.chosen.is_identity());
      CHECK(scan.report.clean());
    }
  }
  SUBCASE("empty relation set: identity and an empty report") {
    ScanResult scan = convention_scan(family_verlinde(3, 0, n), {});
    CHECK(scan.chosen.is_identity());
    CHECK(scan.report.entries.empty());
    CHECK_FALSE(scan.warning);
  }
  SUBCASE("reports are deterministic") {
    const Family f = family_segre(3, 3, n);
    ScanResult a = convention_scan(f, segre_relations(3, 3));
    ScanResult b = convention_scan(f, segre_relations(3, 3));
    CHECK(a.chosen == b.chosen);
    REQUIRE(a.report.entries.size() == b.report.entries.size());
    for (std::size_t i = 0; i < a.report.entries.size(); ++i) {
      CHECK(a.report.entries[i].id == b.report.entries[i].id);
      CHECK(a.report.entries[i].first_nonzero == b.report.entries[i].first_nonzero);
    }
  }
}

TEST_CASE("closed-form families are clean under the selected convention") {
  const int n = 14;
  for (int rho = 1; rho <= 4; ++rho) {
    for (int r : {-rho, 0, rho}) {
      ScanResult scan = convention_scan(family_verlinde(rho, r, n), verlinde_relations(rho, r));
      CHECK_MESSAGE(!scan.warning, "rho=" << rho << " r=" << r);
    }
    for (int s : {0, rho, 2 * rho}) {
      ScanResult scan = convention_scan(family_segre(rho, s, n), segre_relations(rho, s));
      CHECK_MESSAGE(!scan.warning, "rho=" << rho << " s=" << s);
    }
  }
}

TEST_CASE("upper x-layer prefactor resolves to 1") {
  const int n = 12;
  for (int rho = 2; rho <= 4; ++rho) {
    for (int s : {0, rho, 2 * rho}) {
      const Family f = family_segre(rho, s, n);
      ScanResult scan = convention_scan(f, segre_relations(rho, s));
      int upper = 0;
      bool rho_prefactor_fails = false;
      for (const auto& e : scan.report.entries) {
        if (e.id.kind != RelationKind::segre_exp_upper) continue;
        ++upper;
        CHECK(e.prefactor == Rational(1));
        if (!is_zero_series(eval_segre_relation(f, e.id, scan.chosen, Rational(rho)))) rho_prefactor_fails = true;
      }
      if (upper > 0) CHECK(rho_prefactor_fails);
    }
  }
}

TEST_CASE("the first x-layer is checked independently of the plain relation") {
  const int n = 12;
  for (int rho = 2; rho <= 4; ++rho) {
    Family f = family_segre(rho, rho, n);
    const Convention conv = clean_convention(f, segre_relations(rho, rho));
    f.linear[1][3] += CycNum(cyc_context(rho), ratio(1, 3));
    for (int a = -rho; a <= 0; ++a) {
      CHECK(is_zero_series(eval_segre_relation(f, RelationId::segre_plain(a), conv)));
    }
    bool layer_fails = false;
    for (int a = 1 - rho; a <= 0; ++a) {
      if (!is_zero_series(eval_segre_relation(f, RelationId::segre_exp_lower(a, 1), conv))) layer_fails = true;
    }
    CHECK(layer_fails);
  }
}

TEST_CASE("corrupted coefficients are detected") {
  std::mt19937 gen(20261015);
  const int n = 10;
  int detected = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int rho = 2 + static_cast<int>(gen() % 3);
    const bool segre = trial % 2 == 1;
    const int param = segre ? rho * static_cast<int>(gen() % 3) : rho * (static_cast<int>(gen() % 3) - 1);
    Family f = segre ? family_segre(rho, param, n) : family_verlinde(rho, param, n);
    const auto rels = default_relations(f.kind, rho, param);
    const Convention conv = clean_convention(f, rels);

    const SubsetMask J = gen() % subset_count(rho);
    const int k = 1 + static_cast<int>(gen() % n);
    const int member = static_cast<int>(gen() % (segre ? 3 : 2));
    std::vector<Series>& target = member == 0 ? f.base : member == 1 ? f.weight : f.linear;
    const long num = 1 + static_cast<long>(gen() % 9);
    target[J][k] += CycNum(cyc_context(rho), ratio(num, 11));

    const ResidualReport rep = verify_family(f, rels, conv);
    CAPTURE(trial);
    CAPTURE(rho);
    CAPTURE(param);
    CAPTURE(k);
    CAPTURE(member);
    CHECK_FALSE(rep.clean());
    CHECK(earliest_failure(rep) <= k);
    CHECK(convention_scan(f, rels).warning);
    if (!rep.clean()) ++detected;
  }
  CHECK(detected == 20);
}
