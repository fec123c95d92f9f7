#include "virtblow/family.hpp"

#include <bit>

#include "virtblow/errors.hpp"

namespace vb {

int subset_size(SubsetMask mask) { return std::popcount(mask); }

int subset_norm(SubsetMask mask) {
  int n = 0;
  for (int j = 1; mask != 0; ++j, mask >>= 1) {
    if (mask & 1U) n += j;
  }
  return n;
}

std::vector<int> subset_members(SubsetMask mask) {
  std::vector<int> out;
  for (int j = 1; mask != 0; ++j, mask >>= 1) {
    if (mask & 1U) out.push_back(j);
  }
  return out;
}

std::string subset_label(SubsetMask mask) {
  std::string out = "{";
  for (int j : subset_members(mask)) {
    if (out.size() > 1) out += ',';
    out += std::to_string(j);
  }
  return out + "}";
}

std::string to_string(FamilyKind kind) { return kind == FamilyKind::verlinde ? "verlinde" : "segre"; }

FamilyKind parse_family_kind(const std::string& text) {
  if (text == "verlinde") return FamilyKind::verlinde;
  if (text == "segre") return FamilyKind::segre;
  throw ConfigError("unknown family kind '" + text + "' (expected verlinde or segre)");
}

TruncSeries<Jet> lift(const Series& s) {
  return map_coeffs<Jet>(s, [](const CycNum& c) { return Jet(c); });
}

UniversalFamily<Jet> lift(const Family& f) {
  UniversalFamily<Jet> r;
  r.rho = f.rho;
  r.kind = f.kind;
  r.parameter = f.parameter;
  for (const auto& s : f.base) r.base.push_back(lift(s));
  for (const auto& s : f.weight) r.weight.push_back(lift(s));
  for (const auto& s : f.linear) r.linear.push_back(lift(s));
  return r;
}

}  // namespace vb
