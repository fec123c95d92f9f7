#include "virtblow/cyclotomic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "virtblow/errors.hpp"

namespace vb {

namespace {

using IntPoly = std::vector<long long>;

// Exact division of integer polynomials, divisor monic.
IntPoly divide_monic(IntPoly num, const IntPoly& den) {
  const std::size_t dd = den.size() - 1;
  if (num.size() < den.size()) return {0};
  IntPoly quot(num.size() - dd, 0);
  for (std::size_t k = num.size(); k-- > dd;) {
    long long lead = num[k];
    if (lead == 0) continue;
    quot[k - dd] = lead;
    for (std::size_t m = 0; m <= dd; ++m) num[k - dd + m] -= lead * den[m];
  }
  for (std::size_t m = 0; m < dd; ++m) {
    if (num[m] != 0) throw std::logic_error("cyclotomic division left a remainder");
  }
  return quot;
}

using RatPoly = std::vector<Rational>;

void trim(RatPoly& p) {
  while (!p.empty() && is_zero(p.back())) p.pop_back();
}

// q, r with a = q*b + r.
std::pair<RatPoly, RatPoly> divmod(RatPoly a, const RatPoly& b) {
  trim(a);
  if (a.size() < b.size()) return {RatPoly{}, a};
  RatPoly q(a.size() - b.size() + 1);
  const Rational& lead = b.back();
  for (std::size_t k = a.size(); k-- >= b.size();) {
    if (is_zero(a[k])) continue;
    Rational f = a[k] / lead;
    q[k - (b.size() - 1)] = f;
    for (std::size_t m = 0; m < b.size(); ++m) a[k - (b.size() - 1) + m] -= f * b[m];
    if (k == b.size() - 1) break;
  }
  trim(a);
  trim(q);
  return {q, a};
}

RatPoly poly_mul(const RatPoly& a, const RatPoly& b) {
  if (a.empty() || b.empty()) return {};
  RatPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

RatPoly poly_sub(RatPoly a, const RatPoly& b) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim(a);
  return a;
}

}  // namespace

int totient(int n) {
  int result = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

std::vector<long long> cyclotomic_polynomial(int n) {
  static std::mutex mu;
  static std::map<int, IntPoly> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  IntPoly p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(n)] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d == 0) p = divide_monic(p, cyclotomic_polynomial(d));
  }
  std::lock_guard lock(mu);
  cache.emplace(n, p);
  return p;
}

CycContext::CycContext(int rho) : rho_(rho), conductor_(4 * rho) {
  if (rho < 1) throw DomainError("rho must be positive");
  min_poly_ = cyclotomic_polynomial(conductor_);
  degree_ = static_cast<int>(min_poly_.size()) - 1;
  if (degree_ != totient(conductor_)) throw std::logic_error("cyclotomic degree mismatch");
  const std::size_t d = static_cast<std::size_t>(degree_);
  std::vector<Rational> cur(d);
  cur[0] = 1;
  reduced_powers_.reserve(static_cast<std::size_t>(conductor_));
  for (int k = 0; k < conductor_; ++k) {
    reduced_powers_.push_back(cur);
    // multiply by xi and reduce
    Rational carry = cur[d - 1];
    for (std::size_t m = d - 1; m > 0; --m) cur[m] = cur[m - 1];
    cur[0] = 0;
    if (!is_zero(carry)) {
      for (std::size_t m = 0; m < d; ++m) cur[m] -= carry * Rational(static_cast<long>(min_poly_[m]));
    }
  }
  for (std::size_t m = 0; m < d; ++m) {
    if (cur[m] != (m == 0 ? 1 : 0)) throw std::logic_error("xi^conductor != 1");
  }
}

const std::vector<Rational>& CycContext::root_power(long long k) const {
  long long n = conductor_;
  long long r = ((k % n) + n) % n;
  return reduced_powers_[static_cast<std::size_t>(r)];
}

CycContextPtr cyc_context(int rho) {
  static std::mutex mu;
  static std::map<int, CycContextPtr> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(rho); it != cache.end()) return it->second;
  auto ctx = std::make_shared<const CycContext>(rho);
  cache.emplace(rho, ctx);
  return ctx;
}

std::pair<CycContextPtr, CycNum> make_root(int rho) {
  auto ctx = cyc_context(rho);
  return {ctx, CycNum::root_power(ctx, 1)};
}

CycNum::CycNum(CycContextPtr ctx, const Rational& value) : ctx_(std::move(ctx)) {
  if (!vb::is_zero(value)) {
    c_.assign(static_cast<std::size_t>(ctx_->degree()), Rational(0));
    c_[0] = value;
  }
}

CycNum::CycNum(CycContextPtr ctx, std::vector<Rational> coeffs) : ctx_(std::move(ctx)) {
  const std::size_t d = static_cast<std::size_t>(ctx_->degree());
  if (coeffs.size() <= d) {
    coeffs.resize(d);
    c_ = std::move(coeffs);
  } else {
    c_.assign(d, Rational(0));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (vb::is_zero(coeffs[k])) continue;
      const auto& row = ctx_->root_power(static_cast<long long>(k));
      for (std::size_t m = 0; m < d; ++m) {
        if (!vb::is_zero(row[m])) c_[m] += coeffs[k] * row[m];
      }
    }
  }
}

CycNum CycNum::root_power(const CycContextPtr& ctx, long long k) {
  return CycNum(ctx, ctx->root_power(k));
}

bool CycNum::is_zero() const {
  for (const auto& q : c_) {
    if (!vb::is_zero(q)) return false;
  }
  return true;
}

bool CycNum::is_rational() const {
  for (std::size_t m = 1; m < c_.size(); ++m) {
    if (!vb::is_zero(c_[m])) return false;
  }
  return true;
}

void CycNum::adopt(const CycNum& o) {
  if (!o.ctx_) return;
  if (!ctx_) {
    ctx_ = o.ctx_;
    return;
  }
  if (ctx_ != o.ctx_ && ctx_->rho() != o.ctx_->rho()) {
    throw DomainError("mixing cyclotomic elements of different conductors");
  }
}

CycNum& CycNum::operator+=(const CycNum& o) {
  adopt(o);
  if (o.c_.empty()) return *this;
  if (c_.empty()) {
    c_ = o.c_;
    return *this;
  }
  for (std::size_t m = 0; m < c_.size(); ++m) {
    if (!vb::is_zero(o.c_[m])) c_[m] += o.c_[m];
  }
  return *this;
}

CycNum& CycNum::operator-=(const CycNum& o) {
  adopt(o);
  if (o.c_.empty()) return *this;
  if (c_.empty()) c_.assign(o.c_.size(), Rational(0));
  for (std::size_t m = 0; m < c_.size(); ++m) {
    if (!vb::is_zero(o.c_[m])) c_[m] -= o.c_[m];
  }
  return *this;
}

CycNum CycNum::operator-() const {
  CycNum r = *this;
  for (auto& q : r.c_) q = -q;
  return r;
}

CycNum& CycNum::operator*=(const Rational& q) {
  if (vb::is_zero(q)) {
    c_.clear();
    return *this;
  }
  for (auto& c : c_) {
    if (!vb::is_zero(c)) c *= q;
  }
  return *this;
}

CycNum& CycNum::operator*=(const CycNum& o) {
  adopt(o);
  if (c_.empty() || o.c_.empty()) {
    c_.clear();
    return *this;
  }
  const std::size_t d = c_.size();
  if (o.is_rational()) return *this *= o.c_[0];
  if (is_rational()) {
    Rational q = c_[0];
    c_ = o.c_;
    return *this *= q;
  }
  std::vector<Rational> prod(2 * d - 1);
  std::vector<std::size_t> nz;
  for (std::size_t j = 0; j < d; ++j) {
    if (!vb::is_zero(o.c_[j])) nz.push_back(j);
  }
  Rational tmp;
  for (std::size_t i = 0; i < d; ++i) {
    if (vb::is_zero(c_[i])) continue;
    for (std::size_t j : nz) {
      mpq_mul(tmp.get_mpq_t(), c_[i].get_mpq_t(), o.c_[j].get_mpq_t());
      prod[i + j] += tmp;
    }
  }
  for (std::size_t m = 0; m < d; ++m) c_[m] = std::move(prod[m]);
  for (std::size_t k = d; k < 2 * d - 1; ++k) {
    if (vb::is_zero(prod[k])) continue;
    auto row = ctx_->power_row(static_cast<int>(k));
    for (std::size_t m = 0; m < d; ++m) {
      if (vb::is_zero(row[m])) continue;
      mpq_mul(tmp.get_mpq_t(), prod[k].get_mpq_t(), row[m].get_mpq_t());
      c_[m] += tmp;
    }
  }
  return *this;
}

CycNum operator/(CycNum a, const Rational& q) {
  if (is_zero(q)) throw DivisionByZero("division of a cyclotomic element by zero");
  Rational inv = 1 / q;
  return a *= inv;
}

CycNum CycNum::inverse() const {
  if (is_zero()) throw DivisionByZero("inverse of zero in the cyclotomic field");
  if (is_rational()) return CycNum(ctx_, Rational(1) / c_[0]);
  // extended Euclid: s*a + t*m = g, with g a nonzero constant
  RatPoly m;
  for (long long c : ctx_->min_poly()) m.emplace_back(static_cast<long>(c));
  RatPoly a = c_;
  trim(a);
  RatPoly r0 = m, r1 = a;
  RatPoly s0{}, s1{Rational(1)};
  while (!r1.empty() && r1.size() > 1) {
    auto [q, r] = divmod(r0, r1);
    RatPoly s2 = poly_sub(s0, poly_mul(q, s1));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r1.empty()) throw std::logic_error("minimal polynomial is not irreducible");
  Rational g = r1[0];
  for (auto& q : s1) q /= g;
  return CycNum(ctx_, std::move(s1));
}

CycNum CycNum::pow(long long e) const {
  if (e < 0) return inverse().pow(-e);
  CycNum result(ctx_, Rational(1));
  CycNum base = *this;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

CycNum CycNum::conjugate() const {
  if (c_.empty()) return *this;
  std::vector<Rational> out(c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (vb::is_zero(c_[k])) continue;
    const auto& row = ctx_->root_power(-static_cast<long long>(k));
    for (std::size_t m = 0; m < c_.size(); ++m) {
      if (!vb::is_zero(row[m])) out[m] += c_[k] * row[m];
    }
  }
  return CycNum(ctx_, std::move(out));
}

std::complex<double> CycNum::embed() const {
  std::complex<double> z{0.0, 0.0};
  if (c_.empty()) return z;
  const double step = std::numbers::pi / (2.0 * ctx_->rho());
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (vb::is_zero(c_[k])) continue;
    z += c_[k].get_d() * std::polar(1.0, step * static_cast<double>(k));
  }
  return z;
}

bool operator==(const CycNum& a, const CycNum& b) {
  const std::size_t n = std::max(a.c_.size(), b.c_.size());
  static const Rational zero(0);
  for (std::size_t m = 0; m < n; ++m) {
    const Rational& x = m < a.c_.size() ? a.c_[m] : zero;
    const Rational& y = m < b.c_.size() ? b.c_[m] : zero;
    if (x != y) return false;
  }
  return true;
}

std::string to_string(const CycNum& a) {
  std::ostringstream os;
  bool first = true;
  const auto& c = a.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (is_zero(c[k])) continue;
    Rational q = c[k];
    if (first) {
      if (sgn(q) < 0) {
        os << "-";
        q = -q;
      }
    } else {
      os << (sgn(q) < 0 ? " - " : " + ");
      if (sgn(q) < 0) q = -q;
    }
    if (k == 0) {
      os << q.get_str();
    } else {
      if (q != 1) os << q.get_str() << "*";
      os << "x";
      if (k > 1) os << "^" << k;
    }
    first = false;
  }
  return first ? "0" : os.str();
}

CycNum parse_cycnum(const CycContextPtr& ctx, std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t') s.push_back(ch);
  }
  if (s.empty()) throw ConfigError("empty cyclotomic literal");
  std::vector<Rational> coeffs;
  std::size_t pos = 0;
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    }
    std::size_t end = pos;
    while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
    std::string term = s.substr(pos, end - pos);
    if (term.empty()) throw ConfigError("malformed cyclotomic literal '" + std::string(text) + "'");
    Rational coef(1);
    std::size_t power = 0;
    std::size_t xpos = term.find('x');
    if (xpos == std::string::npos) {
      coef = parse_rational(term);
    } else {
      if (xpos > 0) {
        if (term[xpos - 1] != '*' || xpos < 2) {
          throw ConfigError("malformed cyclotomic term '" + term + "'");
        }
        coef = parse_rational(term.substr(0, xpos - 1));
      }
      std::string rest = term.substr(xpos + 1);
      if (rest.empty()) {
        power = 1;
      } else if (rest[0] == '^' && rest.size() > 1) {
        for (std::size_t i = 1; i < rest.size(); ++i) {
          if (rest[i] < '0' || rest[i] > '9') throw ConfigError("bad exponent in '" + term + "'");
        }
        power = std::stoul(rest.substr(1));
      } else {
        throw ConfigError("malformed cyclotomic term '" + term + "'");
      }
    }
    if (coeffs.size() <= power) coeffs.resize(power + 1);
    coeffs[power] += sign * coef;
    pos = end;
  }
  return CycNum(ctx, std::move(coeffs));
}

}  // namespace vb
