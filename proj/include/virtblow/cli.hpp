#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vb::cli {

inline constexpr const char* kToolName = "virtblow";
inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes: 0 success or clean verification, 1 residual or solve failure,
/// 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vb::cli
