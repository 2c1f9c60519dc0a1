#include "tidal/config_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace tidal {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string where(int line) { return "line " + std::to_string(line) + ": "; }

double parse_real(std::string_view text, int line) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(where(line) + "malformed number '" + std::string(text) +
                      "'");
  }
  return value;
}

int parse_int(std::string_view text, int line) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(where(line) + "malformed integer '" + std::string(text) +
                      "'");
  }
  return value;
}

constexpr std::array<std::string_view, 10> kRequired = {
    "number_of_bodies",
    "mass_of_planet",
    "mass_of_satellite",
    "initial_time_step",
    "total_simulation_time",
    "body_chosen_as_origin",
    "tolerance",
    "initial_distance_of_satellite",
    "unstretched_length_of_spring",
    "initial_eccentricity",
};

constexpr std::array<std::string_view, 4> kOptional = {
    "spring_constant", "damping_coefficient", "output_interval",
    "gravitational_constant"};

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                       value, std::chars_format::general, 17);
  return std::string(buf.data(), ptr);
}

SimulationConfig parse_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>, std::less<>> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where(line_no) + "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const bool known =
        std::find(kRequired.begin(), kRequired.end(), key) != kRequired.end() ||
        std::find(kOptional.begin(), kOptional.end(), key) != kOptional.end();
    if (!known) throw ConfigError(where(line_no) + "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where(line_no) + "missing value");
    if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
      throw ConfigError(where(line_no) + "duplicate key '" + key + "'");
    }
  }

  std::string missing;
  for (auto key : kRequired) {
    if (!entries.contains(key)) missing += (missing.empty() ? "" : ", ") + std::string(key);
  }
  if (!missing.empty()) throw ConfigError("missing required keys: " + missing);

  auto real = [&](std::string_view key) {
    const auto& [value, line] = entries.find(key)->second;
    return parse_real(value, line);
  };
  auto integer = [&](std::string_view key) {
    const auto& [value, line] = entries.find(key)->second;
    return parse_int(value, line);
  };

  SimulationConfig c;
  c.number_of_bodies = integer("number_of_bodies");
  c.mass_of_planet = real("mass_of_planet");
  c.mass_of_satellite = real("mass_of_satellite");
  c.initial_time_step = real("initial_time_step");
  c.total_simulation_time = real("total_simulation_time");
  c.body_chosen_as_origin = integer("body_chosen_as_origin");
  c.tolerance = real("tolerance");
  c.initial_distance_of_satellite = real("initial_distance_of_satellite");
  c.unstretched_length_of_spring = real("unstretched_length_of_spring");
  c.initial_eccentricity = real("initial_eccentricity");
  if (entries.contains("gravitational_constant")) {
    c.constants.gravitational_constant = real("gravitational_constant");
  }
  if (entries.contains("output_interval")) c.output_interval = real("output_interval");
  c.spring_constant = entries.contains("spring_constant")
                          ? real("spring_constant")
                          : default_spring_constant(c.mass_of_satellite);
  c.damping_coefficient =
      entries.contains("damping_coefficient")
          ? real("damping_coefficient")
          : default_damping_coefficient(c.spring_constant, c.mass_of_satellite);
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

std::string format_config(const SimulationConfig& c) {
  std::ostringstream out;
  out << "number_of_bodies = " << c.number_of_bodies << '\n'
      << "mass_of_planet = " << format_double(c.mass_of_planet) << '\n'
      << "mass_of_satellite = " << format_double(c.mass_of_satellite) << '\n'
      << "initial_time_step = " << format_double(c.initial_time_step) << '\n'
      << "total_simulation_time = " << format_double(c.total_simulation_time)
      << '\n'
      << "body_chosen_as_origin = " << c.body_chosen_as_origin << '\n'
      << "tolerance = " << format_double(c.tolerance) << '\n'
      << "initial_distance_of_satellite = "
      << format_double(c.initial_distance_of_satellite) << '\n'
      << "unstretched_length_of_spring = "
      << format_double(c.unstretched_length_of_spring) << '\n'
      << "initial_eccentricity = " << format_double(c.initial_eccentricity)
      << '\n'
      << "spring_constant = " << format_double(c.spring_constant) << '\n'
      << "damping_coefficient = " << format_double(c.damping_coefficient)
      << '\n'
      << "output_interval = " << format_double(c.output_interval) << '\n'
      << "gravitational_constant = "
      << format_double(c.constants.gravitational_constant) << '\n';
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace tidal
