#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace vb {

using Rational = mpq_class;

/// "p/q", or "p" when q == 1.
std::string to_string(const Rational& q);

/// Parses "p", "-p" or "p/q"; throws ConfigError on malformed input.
Rational parse_rational(std::string_view text);

/// num/den in lowest terms (mpq_class(num, den) does not canonicalize).
inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational from_integer(long long v) { return Rational(static_cast<long>(v)); }

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline Rational zero_like(const Rational&) { return Rational(0); }
inline Rational one_like(const Rational&) { return Rational(1); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// a(a+1)/2, i.e. binom(a+1, 2) for rational a.
inline Rational binom_a1_2(const Rational& a) {
  Rational r = a * (a + 1) / 2;
  r.canonicalize();
  return r;
}

}  // namespace vb
