#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "virtblow/cyclotomic.hpp"
#include "virtblow/jet.hpp"
#include "virtblow/series.hpp"

namespace vb {

using Series = TruncSeries<CycNum>;
using SubsetMask = std::uint32_t;

/// Number of subsets of [rho-1].
inline SubsetMask subset_count(int rho) { return SubsetMask{1} << (rho - 1); }
inline bool contains(SubsetMask mask, int j) { return (mask >> (j - 1)) & 1U; }
int subset_size(SubsetMask mask);
/// Sum of the members.
int subset_norm(SubsetMask mask);
std::vector<int> subset_members(SubsetMask mask);
/// "{}", "{1,3}".
std::string subset_label(SubsetMask mask);

enum class FamilyKind { verlinde, segre };
std::string to_string(FamilyKind kind);
FamilyKind parse_family_kind(const std::string& text);

/// Universal series indexed by subsets J of [rho-1] (index = bitmask).
/// Verlinde families hold A_J in `base` and B_J in `weight`, in the variable w.
/// Segre families hold Y_J, Z_J and S_J in the variable z.
template <class T>
struct UniversalFamily {
  int rho = 1;
  FamilyKind kind = FamilyKind::verlinde;
  int parameter = 0;
  std::vector<TruncSeries<T>> base;
  std::vector<TruncSeries<T>> weight;
  std::vector<TruncSeries<T>> linear;

  int order() const {
    int n = base.front().order();
    for (const auto* v : {&base, &weight, &linear}) {
      for (const auto& s : *v) n = std::min(n, s.order());
    }
    return n;
  }
  char variable() const { return kind == FamilyKind::verlinde ? 'w' : 'z'; }
};

using Family = UniversalFamily<CycNum>;

template <class T>
UniversalFamily<T> truncated(const UniversalFamily<T>& f, int order) {
  UniversalFamily<T> r = f;
  for (auto* v : {&r.base, &r.weight, &r.linear}) {
    for (auto& s : *v) s = s.truncated(order);
  }
  return r;
}

/// Every member evaluated at minus the variable.
template <class T>
UniversalFamily<T> negate_variable(const UniversalFamily<T>& f) {
  UniversalFamily<T> r = f;
  for (auto* v : {&r.base, &r.weight, &r.linear}) {
    for (auto& s : *v) s = negate_variable(s);
  }
  return r;
}

/// Constant jets (no gradient) from exact series.
TruncSeries<Jet> lift(const Series& s);
UniversalFamily<Jet> lift(const Family& f);

}  // namespace vb
