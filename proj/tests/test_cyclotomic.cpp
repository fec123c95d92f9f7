#include <complex>
#include <random>

#include "doctest.h"
#include "virtblow/cyclotomic.hpp"
#include "virtblow/errors.hpp"

using namespace vb;

namespace {

CycNum random_element(const CycContextPtr& ctx, std::mt19937_64& rng, int height) {
  std::uniform_int_distribution<int> num(-height, height);
  std::uniform_int_distribution<int> den(1, height);
  std::vector<Rational> c(static_cast<std::size_t>(ctx->degree()));
  for (auto& q : c) {
    q = ratio(num(rng), den(rng));
    q.canonicalize();
  }
  return CycNum(ctx, c);
}

}  // namespace

TEST_CASE("cyclotomic polynomials match known small cases") {
  CHECK(cyclotomic_polynomial(4) == std::vector<long long>{1, 0, 1});
  CHECK(cyclotomic_polynomial(8) == std::vector<long long>{1, 0, 0, 0, 1});
  CHECK(cyclotomic_polynomial(12) == std::vector<long long>{1, 0, -1, 0, 1});
  for (int rho = 1; rho <= 12; ++rho) {
    auto ctx = cyc_context(rho);
    CHECK(ctx->degree() == totient(4 * rho));
    CHECK(ctx->min_poly().back() == 1);
  }
}

TEST_CASE("xi is a primitive root of order 4 rho") {
  for (int rho = 1; rho <= 10; ++rho) {
    auto [ctx, xi] = make_root(rho);
    CycNum one(ctx, Rational(1));
    CHECK(xi.pow(4 * rho) == one);
    for (int k = 1; k < 4 * rho; ++k) CHECK_FALSE(xi.pow(k) == one);
    CHECK(xi.pow(4).pow(rho) == one);
    CHECK(xi * xi.pow(4 * rho - 1) == one);
  }
}

TEST_CASE("small-rho identities") {
  auto [c1, i] = make_root(1);
  CHECK(i * i == CycNum(c1, Rational(-1)));
  auto [c2, x2] = make_root(2);
  CHECK(x2.pow(4) == CycNum(c2, Rational(-1)));
  CycNum u = CycNum(c2, Rational(1)) + x2;
  CHECK(u * u.inverse() == CycNum(c2, Rational(1)));
}

TEST_CASE("inverse of zero raises") {
  auto ctx = cyc_context(3);
  CHECK_THROWS_AS(CycNum(ctx).inverse(), DivisionByZero);
  CHECK_THROWS_AS(CycNum() / CycNum(ctx), DivisionByZero);
}

TEST_CASE("complex embedding") {
  auto [c2, x2] = make_root(2);
  auto z = x2.embed();
  CHECK(z.real() == doctest::Approx(std::sqrt(0.5)));
  CHECK(z.imag() == doctest::Approx(std::sqrt(0.5)));
  auto [c3, x3] = make_root(3);
  auto e = x3.pow(4).embed();
  CHECK(e.real() == doctest::Approx(-0.5));
  CHECK(e.imag() == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(std::abs(CycNum(c3).embed()) == 0.0);
}

TEST_CASE("field axioms on random elements") {
  std::mt19937_64 rng(20261015);
  int cases = 0;
  for (int rho = 1; rho <= 10; ++rho) {
    auto ctx = cyc_context(rho);
    for (int trial = 0; trial < 100; ++trial, ++cases) {
      CycNum a = random_element(ctx, rng, 9);
      CycNum b = random_element(ctx, rng, 9);
      CycNum c = random_element(ctx, rng, 9);
      CHECK((a + b) * c == a * c + b * c);
      CHECK(a * b == b * a);
      CHECK((a * b) * c == a * (b * c));
      if (!a.is_zero()) CHECK(a * a.inverse() == CycNum(ctx, Rational(1)));
      CHECK(a.conjugate().conjugate() == a);
      CHECK((a * b).conjugate() == a.conjugate() * b.conjugate());
      std::complex<double> lhs = (a * b).embed();
      std::complex<double> rhs = a.embed() * b.embed();
      CHECK(std::abs(lhs - rhs) < 1e-10);
      CHECK(std::abs((a + b).embed() - a.embed() - b.embed()) < 1e-10);
      // conjugation is complex conjugation under the embedding
      CHECK(std::abs(a.conjugate().embed() - std::conj(a.embed())) < 1e-10);
    }
  }
  CHECK(cases == 1000);
}

TEST_CASE("string round trip") {
  std::mt19937_64 rng(7);
  for (int rho = 1; rho <= 6; ++rho) {
    auto ctx = cyc_context(rho);
    for (int trial = 0; trial < 20; ++trial) {
      CycNum a = random_element(ctx, rng, 5);
      CHECK(parse_cycnum(ctx, to_string(a)) == a);
    }
  }
  auto ctx = cyc_context(2);
  CHECK(to_string(CycNum(ctx)) == "0");
  CHECK(to_string(parse_cycnum(ctx, "1/2 - x^2")) == "1/2 - x^2");
  // x^4 = -1 reduces on input
  CHECK(parse_cycnum(ctx, "x^4") == CycNum(ctx, Rational(-1)));
  CHECK_THROWS_AS(parse_cycnum(ctx, "1 + y"), ConfigError);
}

TEST_CASE("mixing conductors is rejected") {
  auto [c2, x2] = make_root(2);
  auto [c3, x3] = make_root(3);
  CHECK_THROWS_AS(x2 + x3, DomainError);
}
