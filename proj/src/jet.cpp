#include "virtblow/jet.hpp"

namespace vb {

Jet Jet::slot(const CycNum& value, std::size_t index, std::size_t count) {
  std::vector<CycNum> g(count, zero_like(one_like(value)));
  g[index] = one_like(value);
  return Jet(value, std::move(g));
}

CycNum Jet::derivative(std::size_t k) const {
  if (k < grad_.size()) return grad_[k];
  return zero_like(value_);
}

bool Jet::is_constant() const {
  for (const auto& g : grad_) {
    if (!g.is_zero()) return false;
  }
  return true;
}

Jet& Jet::operator+=(const Jet& o) {
  value_ += o.value_;
  if (grad_.size() < o.grad_.size()) grad_.resize(o.grad_.size());
  for (std::size_t k = 0; k < o.grad_.size(); ++k) grad_[k] += o.grad_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  value_ -= o.value_;
  if (grad_.size() < o.grad_.size()) grad_.resize(o.grad_.size());
  for (std::size_t k = 0; k < o.grad_.size(); ++k) grad_[k] -= o.grad_[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  std::vector<CycNum> g(std::max(grad_.size(), o.grad_.size()));
  for (std::size_t k = 0; k < grad_.size(); ++k) {
    if (!grad_[k].is_zero()) g[k] += grad_[k] * o.value_;
  }
  for (std::size_t k = 0; k < o.grad_.size(); ++k) {
    if (!o.grad_[k].is_zero()) g[k] += value_ * o.grad_[k];
  }
  value_ *= o.value_;
  grad_ = std::move(g);
  return *this;
}

Jet& Jet::operator*=(const Rational& q) {
  value_ *= q;
  for (auto& g : grad_) g *= q;
  return *this;
}

Jet& Jet::operator/=(const Jet& o) {
  CycNum inv = o.value_.inverse();
  CycNum quotient = value_ * inv;
  std::vector<CycNum> g(std::max(grad_.size(), o.grad_.size()));
  for (std::size_t k = 0; k < grad_.size(); ++k) {
    if (!grad_[k].is_zero()) g[k] += grad_[k] * inv;
  }
  for (std::size_t k = 0; k < o.grad_.size(); ++k) {
    if (!o.grad_[k].is_zero()) g[k] -= quotient * o.grad_[k] * inv;
  }
  value_ = std::move(quotient);
  grad_ = std::move(g);
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  r.value_ = -r.value_;
  for (auto& g : r.grad_) g = -g;
  return r;
}

bool is_zero(const Jet& a) { return a.value().is_zero() && a.is_constant(); }

}  // namespace vb
