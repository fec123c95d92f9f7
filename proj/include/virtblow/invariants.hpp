#pragma once

#include <optional>
#include <string>
#include <vector>

#include "virtblow/family.hpp"

namespace vb {

/// zero and canonical classes (a = 0, a = K) have pairings derivable from the setup.
enum class ClassRole { general, zero, canonical };
std::string to_string(ClassRole role);
ClassRole parse_class_role(const std::string& text);

/// A Seiberg-Witten basic class a, recorded through its numbers only.
struct BasicClass {
  long long sw = 0;       // SW(a)
  long long pair_K = 0;   // a.K
  long long self_sq = 0;  // a^2
  ClassRole role = ClassRole::general;
};

struct SurfaceData {
  long long chi_O = 1;
  long long K2 = 0;
  std::vector<BasicClass> classes;
  std::vector<std::vector<long long>> gram;  // a_i.a_j

  /// Throws ConfigError on inconsistent data.
  void validate() const;
  /// a.K = a^2 for every class.
  bool canonical_pairing() const;
};

/// The two classes {0, K} of a surface with irreducible canonical divisor.
SurfaceData canonical_surface(long long chi_O, long long K2);

struct LineData {
  Rational L2, LK;
  std::vector<Rational> L_a;        // a.line per class
  std::optional<long long> chi_L;   // chi(L), needed by psi
};

struct AlphaData {
  int rank = 0;
  Rational c1a_sq, c1a_K, c1a_L;
  std::vector<Rational> c1a_a;  // c1(alpha).a per class
  Rational c2a;
  bool is_zero() const;
};

struct Setup {
  int rho = 1;
  std::vector<long long> c1_pair;  // a.c1 per class
  long long c1_sq = 0;
  long long c1_K = 0;
  LineData line;
  AlphaData alpha;
  Rational point_weight;  // u

  /// Checks sizes against the surface and chi(L) against L(L-K)/2 + chi(O)
  /// when L2, LK are integers. Throws ConfigError.
  void validate(const SurfaceData& surface) const;
  /// chi_L, or L(L-K)/2 + chi(O) when that is an integer.
  long long chi_L(const SurfaceData& surface) const;
};

/// Fills empty per-class lists (c1_pair, L_a, c1a_a) from the class roles:
/// zero classes pair to 0, canonical classes to c1_K, LK, c1a_K. Throws
/// ConfigError when a general class has no data (c1a_a may be omitted for alpha = 0).
Setup resolve_pairings(const Setup& setup, const SurfaceData& surface);

/// resolve_pairings for the canonical two-class surface, with chi_L filled in when integral.
Setup canonical_setup(const Setup& setup, const SurfaceData& surface);

struct InvariantResult {
  CycNum value;
  long long vd = 0;
  std::optional<Series> series;
  std::vector<std::string> pipelines;  // evaluation routes that produced (and agreed on) the value
};

long long vd(int rho, long long c1_sq, long long c2, long long chi_O);

/// Segre generating function in z for a Segre family at s = alpha rank.
Series assemble_phi(const SurfaceData& surface, const Setup& setup, const Family& family, int order);
/// Verlinde generating function in w for a Verlinde family at r.
Series assemble_psi(const SurfaceData& surface, const Setup& setup, const Family& family, int order);

/// Sum over subsets J for a surface whose basic classes are 0 and K.
Series assemble_phi_canonical(long long chi_O, long long K2, const Setup& setup, const Family& family, int order);
Series assemble_psi_canonical(long long chi_O, long long K2, const Setup& setup, const Family& family, int order);

/// Coefficient of the vd-th power; throws DomainError if vd exceeds the order
/// or the coefficient is not fixed by complex conjugation.
InvariantResult extract(const Series& series, long long vd);

/// Virtual Verlinde number: coefficient of w^vd of psi for the closed-form
/// family at r. With integral L data the value must be a rational integer
/// (throws std::logic_error otherwise).
InvariantResult verlinde_number(const SurfaceData& surface, const Setup& setup, int r, long long c2, int order);

/// Virtual Segre number: coefficient of z^vd of phi for the closed-form family at s = alpha rank.
InvariantResult segre_number(const SurfaceData& surface, const Setup& setup, long long c2, int order);

/// The Donaldson generating function written through sines and the constants
/// beta_ij (valid when a.K = a^2 for every class).
Series donaldson_direct(const SurfaceData& surface, const Setup& setup, int order);

/// Rank rho Donaldson invariant: the alpha = 0, s = 0 Segre invariant. When
/// a.K = a^2 holds the direct form is evaluated too and must agree exactly.
InvariantResult donaldson(const SurfaceData& surface, const Setup& setup, long long c2, int order);

/// Donaldson invariant of a 4-manifold from signature and Euler number:
/// K^2 = 3 sigma + 2 e, chi(O) = (sigma + e) / 4. The optional twist multiplies
/// by (-1)^{(rho-1)(c1^2 - c1 K)/2}.
InvariantResult fourmanifold_donaldson(long long sigma, long long euler, const std::vector<BasicClass>& classes,
                                       const std::vector<std::vector<long long>>& gram, const Setup& setup,
                                       long long c2, int order, bool twist = false);

}  // namespace vb
