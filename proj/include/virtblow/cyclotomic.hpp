#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "virtblow/rational.hpp"

namespace vb {

/// Shared, immutable description of Q(zeta_{4 rho}).
class CycContext {
 public:
  explicit CycContext(int rho);

  int rho() const { return rho_; }
  int conductor() const { return conductor_; }
  int degree() const { return degree_; }
  /// Monic minimal polynomial, coefficients from x^0 up to x^degree.
  const std::vector<long long>& min_poly() const { return min_poly_; }
  /// Reduced coefficient vector of xi^k for 0 <= k < 2*degree.
  std::span<const Rational> power_row(int k) const {
    return {reduced_powers_[static_cast<std::size_t>(k)]};
  }
  /// Reduced coefficient vector of xi^k for any integer k.
  const std::vector<Rational>& root_power(long long k) const;

 private:
  int rho_;
  int conductor_;
  int degree_;
  std::vector<long long> min_poly_;
  std::vector<std::vector<Rational>> reduced_powers_;  // xi^k, 0 <= k < max(conductor, 2*degree)
};

using CycContextPtr = std::shared_ptr<const CycContext>;

/// Context for rho, cached per process.
CycContextPtr cyc_context(int rho);

/// Euler totient.
int totient(int n);

/// Cyclotomic polynomial Phi_n (coefficients from x^0), by exact division of x^n - 1.
std::vector<long long> cyclotomic_polynomial(int n);

/// Exact element of Q(xi), xi = exp(pi i / (2 rho)), in the power basis.
class CycNum {
 public:
  CycNum() = default;  // detached zero; adopts a context on first mixed operation
  explicit CycNum(CycContextPtr ctx, const Rational& value = Rational(0));
  CycNum(CycContextPtr ctx, std::vector<Rational> coeffs);

  /// xi^k for any integer k.
  static CycNum root_power(const CycContextPtr& ctx, long long k);

  const CycContextPtr& context() const { return ctx_; }
  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const;
  bool is_rational() const;
  /// Constant coefficient; meaningful as "the value" when is_rational().
  Rational rational_part() const { return c_.empty() ? Rational(0) : c_[0]; }

  CycNum& operator+=(const CycNum& o);
  CycNum& operator-=(const CycNum& o);
  CycNum& operator*=(const CycNum& o);
  CycNum& operator*=(const Rational& q);
  CycNum& operator/=(const CycNum& o) { return *this *= o.inverse(); }
  CycNum operator-() const;

  /// Throws DivisionByZero on zero.
  CycNum inverse() const;
  CycNum pow(long long e) const;
  /// Galois automorphism xi -> xi^{-1}.
  CycNum conjugate() const;
  std::complex<double> embed() const;

  friend CycNum operator+(CycNum a, const CycNum& b) { return a += b; }
  friend CycNum operator-(CycNum a, const CycNum& b) { return a -= b; }
  friend CycNum operator*(CycNum a, const CycNum& b) { return a *= b; }
  friend CycNum operator*(CycNum a, const Rational& q) { return a *= q; }
  friend CycNum operator*(const Rational& q, CycNum a) { return a *= q; }
  friend CycNum operator/(CycNum a, const CycNum& b) { return a /= b; }
  friend CycNum operator/(CycNum a, const Rational& q);
  friend bool operator==(const CycNum& a, const CycNum& b);

 private:
  void adopt(const CycNum& o);
  CycContextPtr ctx_;
  std::vector<Rational> c_;  // empty means zero
};

/// (context, xi) for the given rho.
std::pair<CycContextPtr, CycNum> make_root(int rho);

inline bool is_zero(const CycNum& a) { return a.is_zero(); }
inline CycNum zero_like(const CycNum& a) { return CycNum(a.context()); }
inline CycNum one_like(const CycNum& a) { return CycNum(a.context(), Rational(1)); }

/// "c0 + c1*x + c2*x^2 ..." with zero terms omitted; "0" for zero.
std::string to_string(const CycNum& a);
/// Inverse of to_string (also accepts "x^k" with k beyond the degree, and "-" terms).
CycNum parse_cycnum(const CycContextPtr& ctx, std::string_view text);

}  // namespace vb
