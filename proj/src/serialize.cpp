#include "virtblow/serialize.hpp"

#include "virtblow/errors.hpp"

namespace vb {

namespace {

struct MemberNames {
  const char* base;
  const char* weight;
  const char* linear;  // nullptr when the kind has no linear members
};

MemberNames names_for(FamilyKind kind) {
  if (kind == FamilyKind::verlinde) return {"A", "B", nullptr};
  return {"Y", "Z", "S"};
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("family JSON: missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const CycNum& value) {
  const auto z = value.embed();
  return Json{{"exact", to_string(value)}, {"approx", Json::array({z.real(), z.imag()})}};
}

CycNum cycnum_from_json(const CycContextPtr& ctx, const Json& j) {
  if (j.is_string()) return parse_cycnum(ctx, j.get<std::string>());
  if (j.is_object() && j.contains("exact") && j.at("exact").is_string()) {
    return parse_cycnum(ctx, j.at("exact").get<std::string>());
  }
  if (j.is_number_integer()) return CycNum(ctx, from_integer(j.get<long long>()));
  throw ConfigError("expected an exact number, got " + j.dump());
}

Json to_json(const Series& series) {
  Json arr = Json::array();
  for (const auto& c : series.coeffs()) arr.push_back(to_json(c));
  return arr;
}

Series series_from_json(const CycContextPtr& ctx, const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty coefficient array");
  Series s = Series::constant(CycNum(ctx), static_cast<int>(j.size()) - 1);
  for (std::size_t n = 0; n < j.size(); ++n) s[static_cast<int>(n)] = cycnum_from_json(ctx, j[n]);
  return s;
}

Json to_json(const Family& family) {
  const MemberNames names = names_for(family.kind);
  Json members = Json::array();
  for (SubsetMask J = 0; J < subset_count(family.rho); ++J) {
    Json m;
    m["J"] = subset_label(J);
    m[names.base] = to_json(family.base[J]);
    m[names.weight] = to_json(family.weight[J]);
    if (names.linear) m[names.linear] = to_json(family.linear[J]);
    members.push_back(std::move(m));
  }
  return Json{{"kind", to_string(family.kind)},
              {"rho", family.rho},
              {"parameter", family.parameter},
              {"variable", std::string(1, family.variable())},
              {"order", family.order()},
              {"members", std::move(members)}};
}

Family family_from_json(const Json& j) {
  Family f;
  try {
    f.kind = parse_family_kind(field(j, "kind").get<std::string>());
    f.rho = field(j, "rho").get<int>();
    f.parameter = field(j, "parameter").get<int>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("family JSON: ") + e.what());
  }
  if (f.rho < 1 || f.rho > 31) throw ConfigError("family JSON: rho out of range");
  const auto ctx = cyc_context(f.rho);
  const MemberNames names = names_for(f.kind);
  const Json& members = field(j, "members");
  if (!members.is_array() || members.size() != subset_count(f.rho)) {
    throw ConfigError("family JSON: expected one member per subset of [rho-1]");
  }
  for (SubsetMask J = 0; J < subset_count(f.rho); ++J) {
    const Json& m = members[J];
    if (field(m, "J").get<std::string>() != subset_label(J)) {
      throw ConfigError("family JSON: members out of order at " + subset_label(J));
    }
    f.base.push_back(series_from_json(ctx, field(m, names.base)));
    f.weight.push_back(series_from_json(ctx, field(m, names.weight)));
    if (names.linear) f.linear.push_back(series_from_json(ctx, field(m, names.linear)));
  }
  return f;
}

Json to_json(const Convention& conv) {
  return Json{{"name", to_string(conv)},
              {"phase_on_complement", conv.phase_on_complement},
              {"conjugate_xi", conv.conjugate_xi},
              {"negate_w", conv.negate_w}};
}

Json to_json(const ResidualReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    Json row{{"relation", to_string(e.id)}, {"clean", e.clean()}};
    row["first_nonzero"] = e.first_nonzero ? Json(*e.first_nonzero) : Json(nullptr);
    if (e.id.kind == RelationKind::segre_exp_upper) row["prefactor"] = to_string(e.prefactor);
    entries.push_back(std::move(row));
  }
  return Json{{"order", report.order},
              {"convention", to_json(report.convention)},
              {"clean", report.clean()},
              {"relations", std::move(entries)}};
}

}  // namespace vb
