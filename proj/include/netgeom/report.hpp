#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netgeom/sampling.hpp"

namespace netgeom {

using ordered_json = nlohmann::ordered_json;

/// One verdict with the residual and tolerance behind it. Lines that do not
/// count still print, but only counted lines drive the exit code.
struct ReportLine {
  std::string subject;
  Verdict verdict = Verdict::Holds;
  std::optional<double> residual;
  std::optional<double> tolerance;
  std::string note;
  bool counted = true;
};

struct Report {
  std::string command;
  ordered_json settings = ordered_json::object();
  ordered_json result = ordered_json::object();
  std::vector<ReportLine> lines;
  std::optional<double> wall_clock;  // only emitted when requested

  /// Fails if any counted line fails, inconclusive if any counted line is
  /// inconclusive, otherwise holds.
  Verdict summary() const;
  /// 0 holds, 2 fails, 3 inconclusive.
  int exit_code() const;
};

enum class Format { Text, Json };
Format parse_format(const std::string& s);

/// JSON with insertion-ordered keys and every float printed as %.12e.
std::string dump_json(const ordered_json& j);

std::string emit(const Report& report, Format format);

}  // namespace netgeom
