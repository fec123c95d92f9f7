#include "virtblow/transforms.hpp"

#include "virtblow/errors.hpp"
#include "virtblow/universal.hpp"

namespace vb {

namespace {

Series one_plus_sq(const CycContextPtr& ctx, const Rational& k, int n) {
  Series s = Series::constant(CycNum(ctx, Rational(1)), n);
  if (n >= 2) s[2] = CycNum(ctx, k);
  return s;
}

}  // namespace

VarChain var_chain(int rho, const Rational& r, const Rational& s, int order) {
  if (rho < 1) throw DomainError("rho must be positive");
  auto ctx = cyc_context(rho);
  VarChain c;
  c.rho = rho;
  c.verlinde_param = r;
  c.segre_param = s;
  const Series x = variable(CycNum(ctx), order);
  const Rational e1 = 1 - s / rho;
  c.z_of_t = x * pow(one_plus_sq(ctx, e1, order), e1 / 2);
  c.v_of_t = x * pow(one_plus_sq(ctx, -r / rho, order), ratio(-1, 2));
  c.w_of_v = x * pow(one_plus_sq(ctx, Rational(1), order), (r * r / (rho * rho) - 1) / 2);
  c.t_of_z = revert(c.z_of_t);
  c.v_of_w = revert(c.w_of_v);
  return c;
}

Series one_plus_v2_in_w(int rho, const Rational& r, int order) {
  VarChain c = var_chain(rho, r, r + rho, order);
  return Series::constant(CycNum(cyc_context(rho), Rational(1)), order) + c.v_of_w * c.v_of_w;
}

Family segre_verlinde(const Family& segre) {
  if (segre.kind != FamilyKind::segre) throw DomainError("segre_verlinde expects a Segre family");
  const int rho = segre.rho;
  const int n = segre.order();
  const Rational s(segre.parameter);
  const Rational r = s - rho;
  VarChain chain = var_chain(rho, r, s, n);
  Series t_of_w = revert(compose(chain.w_of_v, chain.v_of_t));
  Series z_of_w = compose(chain.z_of_t, t_of_w);
  Series lift = compose(basics(rho, s, n).c1a_sq_base, t_of_w);
  Family out;
  out.rho = rho;
  out.kind = FamilyKind::verlinde;
  out.parameter = segre.parameter - rho;
  for (std::size_t J = 0; J < segre.base.size(); ++J) {
    out.base.push_back(lift * compose(segre.base[J], z_of_w));
    out.weight.push_back(compose(segre.weight[J], z_of_w));
  }
  return out;
}

Family serre_dual(const Family& f) {
  if (f.kind != FamilyKind::verlinde) throw DomainError("serre_dual expects a Verlinde family");
  const int rho = f.rho;
  const int n = f.order();
  Series one_plus_v2 = one_plus_v2_in_w(rho, Rational(f.parameter), n);
  Series pre_base = pow(one_plus_v2, Rational(1 - rho));
  Series pre_weight = pow(one_plus_v2, Rational(rho * (rho - 1) / 2));
  Family out;
  out.rho = rho;
  out.kind = FamilyKind::verlinde;
  out.parameter = -f.parameter;
  for (std::size_t J = 0; J < f.base.size(); ++J) {
    Series a = negate_variable(f.base[J]);
    out.base.push_back(pre_base * inverse(a));
    out.weight.push_back(pre_weight * pow_int(a, rho) * negate_variable(f.weight[J]));
  }
  return out;
}

}  // namespace vb
