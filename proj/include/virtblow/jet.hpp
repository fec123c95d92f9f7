#pragma once

#include <vector>

#include "virtblow/cyclotomic.hpp"

namespace vb {

/// First-order jet: a field value plus its gradient with respect to a fixed
/// list of unknown slots. An empty gradient stands for the zero vector.
class Jet {
 public:
  Jet() = default;
  explicit Jet(CycNum value) : value_(std::move(value)) {}
  Jet(CycNum value, std::vector<CycNum> gradient)
      : value_(std::move(value)), grad_(std::move(gradient)) {}

  /// value + e_index, where e_index is a unit vector of length count.
  static Jet slot(const CycNum& value, std::size_t index, std::size_t count);

  const CycNum& value() const { return value_; }
  const std::vector<CycNum>& gradient() const { return grad_; }
  /// Gradient entry k (zero when absent).
  CycNum derivative(std::size_t k) const;
  bool is_constant() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator*=(const Rational& q);
  Jet& operator/=(const Jet& o);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator*(Jet a, const Rational& q) { return a *= q; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }

 private:
  CycNum value_;
  std::vector<CycNum> grad_;
};

bool is_zero(const Jet& a);
inline Jet zero_like(const Jet& a) { return Jet(zero_like(a.value())); }
inline Jet one_like(const Jet& a) { return Jet(one_like(a.value())); }

}  // namespace vb
