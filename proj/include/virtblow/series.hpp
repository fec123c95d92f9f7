#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "virtblow/errors.hpp"
#include "virtblow/rational.hpp"

namespace vb {

/// Power series c_0 + c_1 x + ... + c_N x^N + O(x^{N+1}) over a field-like T.
///
/// T must provide +, -, *, unary -, multiplication by Rational, and the free
/// functions is_zero(T), zero_like(T), one_like(T) found by ADL.
template <class T>
class TruncSeries {
 public:
  TruncSeries() = default;
  explicit TruncSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {}

  static TruncSeries constant(const T& value, int order) {
    std::vector<T> c(static_cast<std::size_t>(order) + 1, zero_like(value));
    c[0] = value;
    return TruncSeries(std::move(c));
  }
  /// value * x^power truncated at order.
  static TruncSeries monomial(const T& value, int power, int order) {
    std::vector<T> c(static_cast<std::size_t>(order) + 1, zero_like(value));
    if (power <= order) c[static_cast<std::size_t>(power)] = value;
    return TruncSeries(std::move(c));
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  bool empty() const { return c_.empty(); }
  const T& operator[](int n) const { return c_[static_cast<std::size_t>(n)]; }
  T& operator[](int n) { return c_[static_cast<std::size_t>(n)]; }
  const std::vector<T>& coeffs() const { return c_; }
  const T& constant_term() const { return c_.front(); }
  bool is_unit() const { return !c_.empty() && !is_zero(c_.front()); }

  TruncSeries truncated(int order) const {
    if (order >= this->order()) return *this;
    return TruncSeries(std::vector<T>(c_.begin(), c_.begin() + order + 1));
  }

  TruncSeries& operator+=(const TruncSeries& o) {
    shrink_to(o.order());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  TruncSeries& operator-=(const TruncSeries& o) {
    shrink_to(o.order());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  TruncSeries& operator*=(const T& s) {
    for (auto& c : c_) c *= s;
    return *this;
  }
  TruncSeries& operator*=(const Rational& q)
    requires(!std::is_same_v<T, Rational>)
  {
    for (auto& c : c_) c *= q;
    return *this;
  }
  TruncSeries& operator*=(const TruncSeries& o) { return *this = *this * o; }
  TruncSeries operator-() const {
    TruncSeries r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
  }

  friend TruncSeries operator+(TruncSeries a, const TruncSeries& b) { return a += b; }
  friend TruncSeries operator-(TruncSeries a, const TruncSeries& b) { return a -= b; }
  friend TruncSeries operator*(TruncSeries a, const T& s) { return a *= s; }
  friend TruncSeries operator*(const T& s, TruncSeries a) { return a *= s; }
  friend TruncSeries operator*(TruncSeries a, const Rational& q)
    requires(!std::is_same_v<T, Rational>)
  {
    return a *= q;
  }
  friend TruncSeries operator*(const Rational& q, TruncSeries a)
    requires(!std::is_same_v<T, Rational>)
  {
    return a *= q;
  }

  friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    const int n = std::min(a.order(), b.order());
    std::vector<T> r(static_cast<std::size_t>(n) + 1, zero_like(a.c_.front()));
    for (int i = 0; i <= n; ++i) {
      if (is_zero(a[i])) continue;
      for (int j = 0; i + j <= n; ++j) {
        if (is_zero(b[j])) continue;
        r[static_cast<std::size_t>(i + j)] += a[i] * b[j];
      }
    }
    return TruncSeries(std::move(r));
  }

  friend bool operator==(const TruncSeries& a, const TruncSeries& b) { return a.c_ == b.c_; }

 private:
  void shrink_to(int order) {
    if (order < this->order()) c_.resize(static_cast<std::size_t>(order) + 1);
  }
  std::vector<T> c_;
};

/// Lowest index with nonzero coefficient, or nullopt if the series vanishes through its order.
template <class T>
std::optional<int> first_nonzero(const TruncSeries<T>& f) {
  for (int k = 0; k <= f.order(); ++k) {
    if (!is_zero(f[k])) return k;
  }
  return std::nullopt;
}

template <class T>
bool is_zero(const TruncSeries<T>& f) {
  return !first_nonzero(f).has_value();
}

/// x truncated at order, with coefficients in the ring of `like`.
template <class T>
TruncSeries<T> variable(const T& like, int order) {
  return TruncSeries<T>::monomial(one_like(like), 1, order);
}

template <class T>
TruncSeries<T> inverse(const TruncSeries<T>& f) {
  if (!f.is_unit()) throw DivisionByZero("series inverse requires a nonzero constant term");
  const int n = f.order();
  const T inv0 = one_like(f[0]) / f[0];
  std::vector<T> g(static_cast<std::size_t>(n) + 1, zero_like(f[0]));
  g[0] = inv0;
  for (int k = 1; k <= n; ++k) {
    T acc = zero_like(f[0]);
    for (int j = 1; j <= k; ++j) {
      if (is_zero(f[j])) continue;
      acc += f[j] * g[static_cast<std::size_t>(k - j)];
    }
    g[static_cast<std::size_t>(k)] = -(acc * inv0);
  }
  return TruncSeries<T>(std::move(g));
}

template <class T>
TruncSeries<T> operator/(const TruncSeries<T>& f, const TruncSeries<T>& g) {
  return f * inverse(g);
}

/// f' truncated one order lower.
template <class T>
TruncSeries<T> derivative(const TruncSeries<T>& f) {
  if (f.order() < 1) throw DomainError("derivative needs order >= 1");
  std::vector<T> d;
  d.reserve(f.coeffs().size() - 1);
  for (int k = 1; k <= f.order(); ++k) d.push_back(f[k] * Rational(k));
  return TruncSeries<T>(std::move(d));
}

/// exp(f), f(0) = 0, via n g_n = sum_k k f_k g_{n-k}.
template <class T>
TruncSeries<T> exp(const TruncSeries<T>& f) {
  if (!is_zero(f[0])) throw DomainError("exp requires a zero constant term");
  const int n = f.order();
  std::vector<T> g(static_cast<std::size_t>(n) + 1, zero_like(f[0]));
  g[0] = one_like(f[0]);
  for (int m = 1; m <= n; ++m) {
    T acc = zero_like(f[0]);
    for (int k = 1; k <= m; ++k) {
      if (is_zero(f[k])) continue;
      acc += f[k] * g[static_cast<std::size_t>(m - k)] * Rational(k);
    }
    g[static_cast<std::size_t>(m)] = acc * ratio(1, m);
  }
  return TruncSeries<T>(std::move(g));
}

/// log(f), f(0) = 1, via g_n = f_n - (1/n) sum_{k<n} k g_k f_{n-k}.
template <class T>
TruncSeries<T> log(const TruncSeries<T>& f) {
  if (!is_zero(f[0] - one_like(f[0]))) throw DomainError("log requires constant term 1");
  const int n = f.order();
  std::vector<T> g(static_cast<std::size_t>(n) + 1, zero_like(f[0]));
  for (int m = 1; m <= n; ++m) {
    T acc = zero_like(f[0]);
    for (int k = 1; k < m; ++k) {
      if (is_zero(g[static_cast<std::size_t>(k)]) || is_zero(f[m - k])) continue;
      acc += g[static_cast<std::size_t>(k)] * f[m - k] * Rational(k);
    }
    g[static_cast<std::size_t>(m)] = f[m] - acc * ratio(1, m);
  }
  return TruncSeries<T>(std::move(g));
}

/// f^alpha for f(0) = 1 and rational alpha:
/// n g_n = sum_{k=1..n} ((alpha+1) k - n) f_k g_{n-k}.
template <class T>
TruncSeries<T> pow_rational(const TruncSeries<T>& f, const Rational& alpha) {
  if (!is_zero(f[0] - one_like(f[0]))) throw DomainError("rational power requires constant term 1");
  const int n = f.order();
  std::vector<T> g(static_cast<std::size_t>(n) + 1, zero_like(f[0]));
  g[0] = one_like(f[0]);
  if (is_zero(alpha)) return TruncSeries<T>(std::move(g));
  const Rational a1 = alpha + 1;
  for (int m = 1; m <= n; ++m) {
    T acc = zero_like(f[0]);
    for (int k = 1; k <= m; ++k) {
      if (is_zero(f[k])) continue;
      Rational w = a1 * k - m;
      if (is_zero(w)) continue;
      acc += f[k] * g[static_cast<std::size_t>(m - k)] * w;
    }
    g[static_cast<std::size_t>(m)] = acc * ratio(1, m);
  }
  return TruncSeries<T>(std::move(g));
}

/// f^e for integer e; negative e requires a unit.
template <class T>
TruncSeries<T> pow_int(const TruncSeries<T>& f, long long e) {
  if (e < 0) return pow_int(inverse(f), -e);
  TruncSeries<T> result = TruncSeries<T>::constant(one_like(f[0]), f.order());
  TruncSeries<T> base = f;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

/// f^alpha dispatching to pow_int for integral exponents (so non-unit constant terms work there).
template <class T>
TruncSeries<T> pow(const TruncSeries<T>& f, const Rational& alpha) {
  if (is_integer(alpha) && alpha.get_num().fits_slong_p()) return pow_int(f, alpha.get_num().get_si());
  return pow_rational(f, alpha);
}

/// f(g) for g(0) = 0, Horner's rule.
template <class T>
TruncSeries<T> compose(const TruncSeries<T>& f, const TruncSeries<T>& g) {
  if (!is_zero(g[0])) throw DomainError("compose requires the inner series to have zero constant term");
  const int n = std::min(f.order(), g.order());
  TruncSeries<T> r = TruncSeries<T>::constant(f[n], n);
  const TruncSeries<T> inner = g.truncated(n);
  for (int k = n - 1; k >= 0; --k) {
    r = r * inner;
    r[0] += f[k];
  }
  return r;
}

/// Compositional inverse: g with f(g(x)) = x, solved one coefficient at a time.
/// [x^m] f(g) = f_1 g_m + sum_{k>=2} f_k [x^m] g^k, and the k >= 2 terms only
/// involve g_1..g_{m-1}, so the power coefficients are tabulated incrementally.
template <class T>
TruncSeries<T> revert(const TruncSeries<T>& f) {
  if (!is_zero(f[0])) throw DomainError("revert requires f(0) = 0");
  if (f.order() == 0) return f;
  if (is_zero(f[1])) throw DomainError("revert requires a nonzero linear coefficient");
  const auto n = static_cast<std::size_t>(f.order());
  const T zero = zero_like(f[0]);
  const T inv1 = one_like(f[1]) / f[1];
  // powers[k][d] = [x^d] g^k
  std::vector<std::vector<T>> powers(n + 1, std::vector<T>(n + 1, zero));
  powers[1][1] = inv1;
  for (std::size_t m = 2; m <= n; ++m) {
    T acc = zero;
    for (std::size_t k = 2; k <= m; ++k) {
      T c = zero;
      for (std::size_t j = 1; j + k - 1 <= m; ++j) {
        const T& gj = powers[1][j];
        const T& prev = powers[k - 1][m - j];
        if (is_zero(gj) || is_zero(prev)) continue;
        c += gj * prev;
      }
      powers[k][m] = c;
      if (!is_zero(f[static_cast<int>(k)]) && !is_zero(c)) acc += f[static_cast<int>(k)] * c;
    }
    powers[1][m] = -(acc * inv1);
  }
  return TruncSeries<T>(std::move(powers[1]));
}

/// f(-x) by sign alternation.
template <class T>
TruncSeries<T> negate_variable(const TruncSeries<T>& f) {
  TruncSeries<T> r = f;
  for (int k = 1; k <= r.order(); k += 2) r[k] = -r[k];
  return r;
}

/// Polynomial in x (degree <= M) with TruncSeries coefficients of a shared order.
template <class T>
class XSeries {
 public:
  XSeries() = default;
  explicit XSeries(std::vector<TruncSeries<T>> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw DomainError("XSeries needs at least one layer");
    int n = layers_.front().order();
    for (const auto& l : layers_) n = std::min(n, l.order());
    for (auto& l : layers_) l = l.truncated(n);
  }
  /// a0 + a1 x + a2 x^2 capped at degree m.
  static XSeries from_terms(const std::vector<TruncSeries<T>>& terms, int max_degree) {
    std::vector<TruncSeries<T>> layers;
    const TruncSeries<T>& first = terms.front();
    for (int d = 0; d <= max_degree; ++d) {
      if (d < static_cast<int>(terms.size())) {
        layers.push_back(terms[static_cast<std::size_t>(d)]);
      } else {
        layers.push_back(TruncSeries<T>::constant(zero_like(first[0]), first.order()));
      }
    }
    return XSeries(std::move(layers));
  }

  int x_degree() const { return static_cast<int>(layers_.size()) - 1; }
  int order() const { return layers_.front().order(); }
  const TruncSeries<T>& layer(int d) const { return layers_[static_cast<std::size_t>(d)]; }
  const std::vector<TruncSeries<T>>& layers() const { return layers_; }

  friend XSeries operator+(const XSeries& a, const XSeries& b) {
    const int m = std::min(a.x_degree(), b.x_degree());
    std::vector<TruncSeries<T>> r;
    for (int d = 0; d <= m; ++d) r.push_back(a.layer(d) + b.layer(d));
    return XSeries(std::move(r));
  }
  friend XSeries operator*(const XSeries& a, const XSeries& b) {
    const int m = std::min(a.x_degree(), b.x_degree());
    std::vector<TruncSeries<T>> r;
    for (int d = 0; d <= m; ++d) {
      TruncSeries<T> acc = a.layer(0) * b.layer(d);
      for (int k = 1; k <= d; ++k) acc += a.layer(k) * b.layer(d - k);
      r.push_back(std::move(acc));
    }
    return XSeries(std::move(r));
  }
  friend XSeries operator*(const XSeries& a, const TruncSeries<T>& s) {
    std::vector<TruncSeries<T>> r;
    for (const auto& l : a.layers_) r.push_back(l * s);
    return XSeries(std::move(r));
  }

 private:
  std::vector<TruncSeries<T>> layers_;
};

/// exp of an x-polynomial F, layer 0 with zero constant term:
/// E_0 = exp(F_0), n E_n = sum_k k F_k E_{n-k}.
template <class T>
XSeries<T> exp(const XSeries<T>& f) {
  std::vector<TruncSeries<T>> e;
  e.push_back(exp(f.layer(0)));
  for (int m = 1; m <= f.x_degree(); ++m) {
    TruncSeries<T> acc = f.layer(1) * e[static_cast<std::size_t>(m - 1)];
    for (int k = 2; k <= m; ++k) acc += (f.layer(k) * e[static_cast<std::size_t>(m - k)]) * Rational(k);
    e.push_back(acc * ratio(1, m));
  }
  return XSeries<T>(std::move(e));
}

/// Coefficientwise map to another ring.
template <class U, class T, class Fn>
TruncSeries<U> map_coeffs(const TruncSeries<T>& f, Fn&& fn) {
  std::vector<U> out;
  out.reserve(f.coeffs().size());
  for (const auto& c : f.coeffs()) out.push_back(fn(c));
  return TruncSeries<U>(std::move(out));
}

}  // namespace vb
