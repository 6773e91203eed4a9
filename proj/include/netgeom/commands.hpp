#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netgeom/manifest.hpp"
#include "netgeom/report.hpp"

namespace netgeom {

/// Command-line overrides; unset fields fall back to the manifest, then to defaults.
struct RunOptions {
  std::optional<double> tolerance;
  std::optional<int> samples;  // random interior points
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

inline constexpr double kDefaultTolerance = 1e-8;

const std::vector<std::string>& command_names();
bool needs_manifest(const std::string& command);

/// Flags a coordinate-block net must carry for the spec's kind.
std::vector<std::string> required_flags(const ProductSpec& spec);

/// Throws std::invalid_argument for an unknown command or a missing manifest.
Report run(const std::string& command, const Manifest* manifest, const RunOptions& options);

}  // namespace netgeom
