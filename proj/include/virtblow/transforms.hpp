#pragma once

#include "virtblow/family.hpp"

namespace vb {

/// The changes of variables relating z, t, v and w for given (rho, r, s).
struct VarChain {
  int rho = 1;
  Rational verlinde_param;
  Rational segre_param;
  Series z_of_t;  // t (1 + (1 - s/rho) t^2)^{(1 - s/rho)/2}
  Series v_of_t;  // t (1 - (r/rho) t^2)^{-1/2}
  Series w_of_v;  // v (1 + v^2)^{(r^2/rho^2 - 1)/2}
  Series t_of_z;
  Series v_of_w;
};

VarChain var_chain(int rho, const Rational& r, const Rational& s, int order);

/// Verlinde family at r = s - rho from a Segre family at s:
/// A_J(w) = W_s(z) Y_J(z), B_J(w) = Z_J(z).
Family segre_verlinde(const Family& segre);

/// Verlinde family at -r from one at r:
/// A_{J,-r}(w) = (1+v^2)^{1-rho} / A_{J,r}(-w),
/// B_{J,-r}(w) = (1+v^2)^{rho(rho-1)/2} A_{J,r}(-w)^rho B_{J,r}(-w).
Family serre_dual(const Family& verlinde);

/// (1 + v^2) as a series in w for parameter r.
Series one_plus_v2_in_w(int rho, const Rational& r, int order);

}  // namespace vb
