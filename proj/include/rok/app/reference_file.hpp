#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rok/linalg.hpp"

namespace rok::app {

/// Binary reference state:
///   "ROKREF1" | uint64 N | N x float64 | uint32 L | L bytes of "key=value\n"
/// All integers and floats little-endian.
struct ReferenceState {
  Vector y;
  std::map<std::string, std::string> metadata;
};

void write_reference(const std::filesystem::path& path, const ReferenceState& ref);
/// Throws ConfigError on a missing file, bad magic or truncated data.
ReferenceState read_reference(const std::filesystem::path& path);

}  // namespace rok::app
