#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tidal/model.hpp"

namespace tidal {

/// Parses `key = value` lines. Blank lines and `#` comments are ignored.
/// The ten scenario keys are required; spring_constant, damping_coefficient,
/// output_interval and gravitational_constant are optional, with k and c
/// defaulting from the satellite mass. Unknown or repeated keys and
/// malformed numbers throw ConfigError naming the line.
SimulationConfig parse_config(std::string_view text);

SimulationConfig load_config(const std::filesystem::path& path);

/// Every key of the config in the parse_config format, at full precision.
std::string format_config(const SimulationConfig& config);

/// 17 significant digits; parses back to the identical double.
std::string format_double(double value);

/// Writes to a sibling temporary file and renames it over `path`, so a
/// reader never sees a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace tidal
