#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "virtblow/errors.hpp"
#include "virtblow/family.hpp"

namespace vb {

enum class RelationKind { verlinde_plain, verlinde_phased, segre_plain, segre_exp_lower, segre_exp_upper, segre_phased_moment, segre_phased };

/// One blowup relation instance. Unused parameters stay 0.
struct RelationId {
  RelationKind kind = RelationKind::verlinde_plain;
  int phase_power = 0;  // l in eps^{l ||J||}
  int shift = 0;        // exponent a (verlinde_phased: the shift i)
  int layer = 0;        // x-layer (segre_exp_*) or power of S (segre_phased_moment)

  static RelationId verlinde_plain(int a) { return {RelationKind::verlinde_plain, 0, a, 0}; }
  static RelationId verlinde_phased(int l, int i) { return {RelationKind::verlinde_phased, l, i, 0}; }
  static RelationId segre_plain(int a) { return {RelationKind::segre_plain, 0, a, 0}; }
  static RelationId segre_exp_lower(int a, int x_order) { return {RelationKind::segre_exp_lower, 0, a, x_order}; }
  static RelationId segre_exp_upper(int a, int x_order) { return {RelationKind::segre_exp_upper, 0, a, x_order}; }
  static RelationId segre_phased_moment(int l, int a, int n) { return {RelationKind::segre_phased_moment, l, a, n}; }
  static RelationId segre_phased(int l, int a) { return {RelationKind::segre_phased, l, a, 0}; }

  bool is_verlinde() const { return kind == RelationKind::verlinde_plain || kind == RelationKind::verlinde_phased; }
  friend auto operator<=>(const RelationId&, const RelationId&) = default;
};

/// e.g. "verlinde_phased(l=1,i=-1)", "segre_exp_lower(a=-1,n=1)".
std::string to_string(const RelationId& id);
/// Inverse of to_string.
RelationId parse_relation(const std::string& text);

/// Sign/phase reading of the relations: which subset carries the phase, whether
/// the phase root is conjugated, and whether the family is evaluated at -w.
struct Convention {
  bool phase_on_complement = false;
  bool conjugate_xi = false;
  bool negate_w = false;

  bool is_identity() const { return !phase_on_complement && !conjugate_xi && !negate_w; }
  int index() const { return (phase_on_complement ? 1 : 0) | (conjugate_xi ? 2 : 0) | (negate_w ? 4 : 0); }
  static Convention from_index(int k) { return {(k & 1) != 0, (k & 2) != 0, (k & 4) != 0}; }
  friend bool operator==(const Convention&, const Convention&) = default;
};

/// "identity", or the set flags joined by '+': "complement", "conjugate", "negate".
std::string to_string(const Convention& c);
Convention parse_convention(const std::string& text);

/// Every in-range relation for a Verlinde family at r (|r| <= rho).
std::vector<RelationId> verlinde_relations(int rho, int r);
/// Every in-range relation for a Segre family at s (0 <= s <= 2 rho).
std::vector<RelationId> segre_relations(int rho, int s);
/// The full set matching the family kind.
std::vector<RelationId> default_relations(FamilyKind kind, int rho, int param);
/// Throws DomainError when id is outside the hypotheses for (kind, rho, param).
void validate_relation(const RelationId& id, FamilyKind kind, int rho, int param);

/// Exponent carried by the base series in the relation.
Rational relation_exponent(const RelationId& id, int rho, int param);

/// Right-hand side of the relation as an exact series in the family variable.
/// `prefactor` multiplies the segre_exp_upper right-hand side.
Series relation_rhs(const RelationId& id, int rho, int param, int order, const Rational& prefactor = 1);

namespace detail {
inline CycNum coerce(const CycNum& c, const CycNum&) { return c; }
inline Jet coerce(const CycNum& c, const Jet&) { return Jet(c); }
template <class T>
TruncSeries<T> coerce_series(const Series& s, const T& like) {
  return map_coeffs<T>(s, [&](const CycNum& c) { return coerce(c, like); });
}
}  // namespace detail

/// Evaluates relation left-hand sides, sharing powers and phase-class sums
/// across relations and conventions.
template <class T>
class RelationEvaluator {
 public:
  explicit RelationEvaluator(const UniversalFamily<T>& family)
      : fam_(family), ctx_(cyc_context(family.rho)), order_(family.order()) {
    validate_family();
  }

  int order() const { return order_; }
  const UniversalFamily<T>& family() const { return fam_; }

  /// sum_J phase_J S_J^n Y_J^a / Z_J  (divided by n! for the x-graded relations).
  TruncSeries<T> lhs(const RelationId& id, const Convention& conv) {
    validate_relation(id, fam_.kind, fam_.rho, fam_.parameter);
    const Rational a = relation_exponent(id, fam_.rho, fam_.parameter);
    const int n = id.kind == RelationKind::segre_exp_lower || id.kind == RelationKind::segre_exp_upper ||
                          id.kind == RelationKind::segre_phased_moment
                      ? id.layer
                      : 0;
    const auto& sums = phase_sums(a, n);
    const T like = fam_.base.front()[0];
    TruncSeries<T> total = sums[0];
    if (id.phase_power == 0) {
      for (int p = 1; p < fam_.rho; ++p) total += sums[static_cast<std::size_t>(p)];
    } else {
      total *= detail::coerce(phase(id.phase_power, 0, conv), like);
      for (int p = 1; p < fam_.rho; ++p) {
        total += sums[static_cast<std::size_t>(p)] * detail::coerce(phase(id.phase_power, p, conv), like);
      }
    }
    if (id.kind == RelationKind::segre_exp_lower || id.kind == RelationKind::segre_exp_upper) {
      Rational fact(1);
      for (int k = 2; k <= n; ++k) fact *= k;
      total *= Rational(1) / fact;
    }
    if (conv.negate_w) total = negate_variable(total);
    return total;
  }

  TruncSeries<T> residual(const RelationId& id, const Convention& conv, const Rational& prefactor = 1) {
    TruncSeries<T> l = lhs(id, conv);
    const T like = fam_.base.front()[0];
    return l - detail::coerce_series(rhs(id, prefactor), like);
  }

  const Series& rhs(const RelationId& id, const Rational& prefactor = 1) {
    auto key = std::make_pair(id, prefactor);
    auto it = rhs_cache_.find(key);
    if (it == rhs_cache_.end()) {
      it = rhs_cache_.emplace(key, relation_rhs(id, fam_.rho, fam_.parameter, order_, prefactor)).first;
    }
    return it->second;
  }

 private:
  void validate_family() const {
    const std::size_t count = subset_count(fam_.rho);
    if (fam_.base.size() != count || fam_.weight.size() != count) {
      throw DomainError("family does not have one member per subset");
    }
    if (fam_.kind == FamilyKind::segre && fam_.linear.size() != count) {
      throw DomainError("Segre family is missing its linear series");
    }
  }

  // eps^{l p} under the convention; p is the phase class of ||J|| mod rho.
  CycNum phase(int l, int p, const Convention& conv) const {
    long long e = p;
    if (conv.phase_on_complement) e = fam_.rho * (fam_.rho - 1) / 2 - p;
    long long k = 4LL * l * e;
    if (conv.conjugate_xi) k = -k;
    return CycNum::root_power(ctx_, k);
  }

  const TruncSeries<T>& base_power(SubsetMask J, const Rational& a) {
    auto& cache = power_cache_[J];
    if (auto it = cache.find(a); it != cache.end()) return it->second;
    const TruncSeries<T>& b = fam_.base[J];
    TruncSeries<T> value;
    if (is_zero(a)) {
      value = TruncSeries<T>::constant(one_like(b[0]), b.order());
    } else if (is_integer(a) && a > 0) {
      value = base_power(J, a - 1) * b;
    } else if (is_integer(a)) {
      value = base_power(J, a + 1) * base_inverse(J);
    } else {
      value = pow_rational(b, a);
    }
    return cache.emplace(a, std::move(value)).first->second;
  }

  const TruncSeries<T>& base_inverse(SubsetMask J) {
    auto it = base_inv_.find(J);
    if (it == base_inv_.end()) it = base_inv_.emplace(J, inverse(fam_.base[J])).first;
    return it->second;
  }

  const TruncSeries<T>& weight_inverse(SubsetMask J) {
    auto it = weight_inv_.find(J);
    if (it == weight_inv_.end()) it = weight_inv_.emplace(J, inverse(fam_.weight[J])).first;
    return it->second;
  }

  struct PowerState {
    std::vector<TruncSeries<T>> running;                  // per J: S_J^k Y_J^a / Z_J at the last level
    std::vector<std::vector<TruncSeries<T>>> levels;      // levels[k][p]
  };

  const std::vector<TruncSeries<T>>& phase_sums(const Rational& a, int n) {
    PowerState& st = states_[a];
    const SubsetMask count = subset_count(fam_.rho);
    const T zero = zero_like(fam_.base.front()[0]);
    auto accumulate = [&]() {
      std::vector<TruncSeries<T>> sums(static_cast<std::size_t>(fam_.rho),
                                       TruncSeries<T>::constant(zero, order_));
      for (SubsetMask J = 0; J < count; ++J) {
        sums[static_cast<std::size_t>(subset_norm(J) % fam_.rho)] += st.running[J];
      }
      st.levels.push_back(std::move(sums));
    };
    if (st.levels.empty()) {
      for (SubsetMask J = 0; J < count; ++J) st.running.push_back(base_power(J, a) * weight_inverse(J));
      accumulate();
    }
    while (static_cast<int>(st.levels.size()) <= n) {
      if (fam_.linear.empty()) throw DomainError("powers of S need a Segre family");
      for (SubsetMask J = 0; J < count; ++J) st.running[J] = st.running[J] * fam_.linear[J];
      accumulate();
    }
    return st.levels[static_cast<std::size_t>(n)];
  }

  const UniversalFamily<T>& fam_;
  CycContextPtr ctx_;
  int order_;
  std::map<SubsetMask, std::map<Rational, TruncSeries<T>>> power_cache_;
  std::map<SubsetMask, TruncSeries<T>> base_inv_;
  std::map<SubsetMask, TruncSeries<T>> weight_inv_;
  std::map<Rational, PowerState> states_;
  std::map<std::pair<RelationId, Rational>, Series> rhs_cache_;
};

template <class T>
TruncSeries<T> eval_relation(const UniversalFamily<T>& family, const RelationId& id, const Convention& conv,
                             const Rational& prefactor = 1) {
  RelationEvaluator<T> ev(family);
  return ev.residual(id, conv, prefactor);
}

/// Residual LHS - RHS of a Verlinde-family relation.
Series eval_verlinde_relation(const Family& family, const RelationId& id, const Convention& conv = {});
/// Residual of a Segre-family relation; x-graded relations report the requested layer.
Series eval_segre_relation(const Family& family, const RelationId& id, const Convention& conv = {},
                  const Rational& prefactor = 1);

/// Blowup ratio psi^/psi for L - mD, or phi^/phi for alpha + k O_D(D) and L - xD
/// (the Segre sum carries Y_J^{-k}).
Series blowup_ratio(const Family& family, int l, int m_or_k, const Rational& x = 0);

struct RelationResult {
  RelationId id;
  std::optional<int> first_nonzero;  // nullopt: clean through the order
  Rational prefactor = 1;            // segre_exp_upper only
  bool clean() const { return !first_nonzero.has_value(); }
};

struct ResidualReport {
  int order = 0;
  Convention convention;
  std::vector<RelationResult> entries;

  bool clean() const;
  /// Sum of vanishing orders, counting clean entries as order + 1.
  long long total_vanishing() const;
  const RelationResult* find(const RelationId& id) const;
};

ResidualReport verify_family(const Family& family, const std::vector<RelationId>& relations,
                             const Convention& conv = {});

struct ScanResult {
  Convention chosen;
  ResidualReport report;
  std::vector<Convention> clean_conventions;
  bool warning = false;  // no convention was clean
};

/// Tries all eight conventions and picks a clean one (identity first).
ScanResult convention_scan(const Family& family, const std::vector<RelationId>& relations);

}  // namespace vb
