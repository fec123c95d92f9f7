#pragma once

#include <vector>

#include "virtblow/family.hpp"

namespace vb {

/// The auxiliary series of the generating functions. The t-series use the Segre
/// parameter s and the v-series the Verlinde parameter r, both set to the given value.
struct BasicSeries {
  int rho = 1;
  Rational param;
  // in t; named after the exponent each carries
  Series c2a_base, c1a_sq_base, chi_base, L2_exponent, c1aL_exponent, u_exponent;
  Series chiL_base, chiO_base;  // in v
};

BasicSeries basics(int rho, const Rational& s_or_r, int order);

/// A series in t re-expanded in z through z = t (1 + (1 - s/rho) t^2)^{(1-s/rho)/2}.
Series t_series_in_z(const Series& f, int rho, const Rational& s);
/// A series in v re-expanded in w through w = v (1 + v^2)^{(r^2/rho^2-1)/2}.
Series v_series_in_w(const Series& f, int rho, const Rational& r);

/// beta_{ij}, B_{ij}, beta_J, B_J and B; indices 1-based, entries [0] unused.
struct ConstantTable {
  int rho = 1;
  CycContextPtr ctx;
  std::vector<std::vector<CycNum>> beta_pair;  // beta_pair[i][j], i != j
  std::vector<std::vector<CycNum>> B_pair;     // B_{ij} for i < j (mirrored), B_{ii} on the diagonal
  std::vector<CycNum> beta_J;                  // by subset mask
  std::vector<CycNum> B_J;                     // by subset mask
  CycNum B_full;  // B = beta_J B_J for every J
};

/// Builds the table and checks its identities; throws std::logic_error if one fails.
const ConstantTable& beta_table(int rho);

/// gamma_ij of the r = 0 family, indexed [i][j] for 1 <= i != j < rho (symmetric).
std::vector<std::vector<Series>> gamma_pairs(int rho, int order);

Family family_verlinde(int rho, int r, int order);
Family family_segre(int rho, int s, int order);

enum class AssembleMode { multiplicative, additive };

/// J -> base * prod_{j in J} per_index[j-1] (or the additive analogue).
std::vector<Series> assemble_J(const Series& base, const std::vector<Series>& per_index,
                               AssembleMode mode);
/// J -> base * prod_{j <= k in J} pairs[j-1][k-1].
std::vector<Series> assemble_pairs(const Series& base,
                                   const std::vector<std::vector<Series>>& pairs);

struct IndexedParts {
  Series base;
  std::vector<Series> per_index;
};
/// Inverse of assemble_J, read off from J = {} and the singletons.
IndexedParts decompose_J(const std::vector<Series>& members, AssembleMode mode);

struct PairParts {
  Series base;
  std::vector<std::vector<Series>> pairs;  // symmetric, 0-based
};
/// Z_ii = Z_{i}/Z_{}, Z_ij = Z_{ij} Z_{} / (Z_{i} Z_{j}).
PairParts decompose_pairs(const std::vector<Series>& members);

/// sin(pi j / rho) = (xi^{2j-rho} + xi^{rho-2j}) / 2.
CycNum sine_of(const CycContextPtr& ctx, int j);

}  // namespace vb
