#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "virtblow/invariants.hpp"

namespace vb {

/// A surface file: the `surface` table and an optional `setup` table.
///
///   surface:
///     chi_O: 2
///     K2: 0
///     basic_classes:
///       - {sw: 1, pair_K: 0, self_sq: 0, role: zero}
///     gram: [[0]]
///   setup:            # every key optional
///     rho: 2
///     c1_pair: [0]
///     c1_sq: 0
///     c1_K: 0
///     L: {L2: 4, LK: 0, L_a: [0], chi_L: 4}
///     alpha: {s: 0, c1a_sq: 0, c1a_K: 0, c1a_L: 0, c1a_a: [0], c2a: 0}
///     u: 0
///
/// Rational fields accept integers or "p/q" strings. Unknown keys are errors.
struct SurfaceConfig {
  SurfaceData surface;
  std::optional<Setup> setup;
};

/// Throws ConfigError with the offending key path.
SurfaceConfig parse_surface_config(std::string_view text);
/// Throws ConfigError if the file cannot be read or parsed.
SurfaceConfig load_surface_config(const std::string& path);

}  // namespace vb
