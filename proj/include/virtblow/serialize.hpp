#pragma once

#include <json.hpp>

#include "virtblow/blowup.hpp"
#include "virtblow/family.hpp"
#include "virtblow/solver.hpp"

namespace vb {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// {"exact": "...", "approx": [re, im]}
Json to_json(const CycNum& value);
/// Accepts the object above or a bare exact string.
CycNum cycnum_from_json(const CycContextPtr& ctx, const Json& j);

Json to_json(const Series& series);
Series series_from_json(const CycContextPtr& ctx, const Json& j);

/// Member names per kind: A/B for Verlinde, Y/Z/S for Segre.
Json to_json(const Family& family);
/// Inverse of to_json(Family); throws ConfigError on malformed input.
Family family_from_json(const Json& j);

Json to_json(const ResidualReport& report);
Json to_json(const Convention& conv);

}  // namespace vb
