#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "virtblow/blowup.hpp"
#include "virtblow/family.hpp"

namespace vb {

/// One unknown coefficient: `order` of the ansatz series number `series`.
struct UnknownSlot {
  std::size_t series = 0;
  int order = 0;
  friend bool operator==(const UnknownSlot&, const UnknownSlot&) = default;
};

/// A family with some coefficients left open. The unknown coefficients live in
/// a list of named series; `build` turns those series (as jets) into the full
/// family at a requested order.
struct Ansatz {
  using Builder = std::function<UniversalFamily<Jet>(const std::vector<TruncSeries<Jet>>&, int)>;

  int rho = 1;
  FamilyKind kind = FamilyKind::verlinde;
  int parameter = 0;
  std::vector<std::string> names;  // one per unknown series
  std::vector<Series> seeds;       // known coefficients; entries at slots are ignored
  std::vector<UnknownSlot> slots;
  Builder build;
  std::string seed_source = "closed form";
  /// Set when every residual is affine in the slots jointly (no products).
  bool affine = false;

  std::string slot_name(std::size_t k) const;
};

/// r = 0 Verlinde family with A_{}, A_{i} fixed and the gamma_ij (i < j) open in
/// every even degree above `known_through`.
Ansatz gamma_ansatz(int rho, int max_order, int known_through = 0);

/// s = 0 Segre family with Y, Z fixed and S_{} = s_0 z, S_{i} = s_i z open.
/// Marked affine, which holds for relations using at most the x^1 layer.
Ansatz segre_linear_ansatz(int rho, int max_order);

/// Splits a family into its per-index and per-pair parts (A_{}, A_i, B_ij, and
/// for Segre families also S_{}, S_i) and opens every coefficient above
/// `known_through`. B_{} (Z_{}) is rebuilt from the pair parts as
/// sum_J 1 / prod_{i <= j in J} B_ij.
Ansatz decomposed_ansatz(const Family& family, int known_through);

/// No unknowns: building returns the family itself.
Ansatz fixed_ansatz(const Family& family);

struct SolveResult {
  Family family;
  std::vector<std::optional<CycNum>> values;  // per slot
  std::vector<int> determined_at;             // per slot: residual order that fixed it
  std::vector<RelationId> relations;
  Convention convention;
  int max_order = 0;
  std::string seed_source;
};

struct SolveOptions {
  Convention convention;
  /// Extra residual orders used beyond max_order; the ansatz must carry slots
  /// through max_order + lookahead. Those above max_order may stay open.
  int lookahead = 0;
};

/// Solves the ansatz order by order. At residual order n the slots of order n
/// open; the order-n residual coefficients, taken as polynomials of degree <= 2
/// in the open slots (first derivatives from jets, second derivatives from jets
/// at unit points), join the equations gathered so far. Products of slots are
/// treated as extra unknowns; every slot the linear system pins down is fixed
/// and substituted. Whenever no slot is open, all residuals through n are
/// rechecked exactly. Throws SolveError on inconsistency, dependence beyond
/// second order, or slots through max_order left open.
SolveResult solve_incremental(const Ansatz& ansatz, const std::vector<RelationId>& relations, int max_order,
                              const SolveOptions& opts = {});

struct ConstantsResult {
  std::vector<CycNum> B_J;  // by subset mask
  Convention convention;
  std::vector<RelationId> relations;
  int order = 0;
};

/// Unknown constants B_J for the A_J of `family` (its weights are ignored): the
/// Verlinde relations are linear in B_J^{-1}. With no convention given, the
/// first consistent convention (by index) is used.
ConstantsResult solve_constants_subset(const Family& family,
                                       const std::vector<RelationId>& relations,
                                       std::optional<Convention> conv = std::nullopt);

struct LinearSystem {
  std::vector<std::vector<CycNum>> rows;
  std::vector<CycNum> rhs;
  std::vector<std::string> labels;  // per row, for error messages
};

struct LinearSolution {
  std::size_t rank = 0;
  std::optional<std::size_t> inconsistent_row;   // a row reducing to 0 = nonzero
  std::optional<std::vector<CycNum>> solution;   // set when rank == unknowns and consistent
  std::vector<std::size_t> free_columns;
  std::vector<std::optional<CycNum>> determined;  // unknowns fixed by the equations
};

/// Exact Gauss-Jordan elimination, rows taken in order; each new pivot is the
/// first nonzero entry of the reduced row.
LinearSolution solve_linear(const LinearSystem& system, std::size_t unknowns, const CycContextPtr& ctx);

struct Interpolant {
  std::vector<CycNum> coeffs;  // ascending powers of r
  int degree = -1;             // -1 for the zero polynomial
  int bound = 0;               // expected maximal degree
  bool exceeds_bound() const { return degree > bound; }
  CycNum operator()(const Rational& r) const;
};

/// Lagrange interpolation through the samples (r, value); `n` is the series
/// order the values come from, giving the degree bound n - 1.
Interpolant interpolate_in_r(const std::vector<std::pair<Rational, CycNum>>& samples, int n);

}  // namespace vb
