#pragma once

// Flat key=value experiment files. One setting per line, '#' starts a
// comment, vectors are comma lists, durations take an s/m/h/d suffix.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sdcp/engine.hpp"

namespace sdcp {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& message);
  [[nodiscard]] const std::string& field() const { return field_; }
  /// 1-based line of the offending setting, 0 when it is not tied to a line.
  [[nodiscard]] int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

/// "10", "10s", "6m", "3h", "1d" -> seconds; "inf" -> +infinity.
/// Throws std::invalid_argument on anything else or a negative value.
double parse_duration(std::string_view text);

/// Unknown keys, duplicate keys, malformed values and violated invariants
/// all throw ConfigError. `origin` prefixes messages (usually the file name).
ExperimentConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");

/// Reads and parses `path`; an unreadable file throws ConfigError on field "path".
ExperimentConfig parse_config(const std::filesystem::path& path);

}  // namespace sdcp
