#include "tidal/trajectory_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tidal/config_io.hpp"

namespace tidal {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  return out;
}

double to_double(const std::string& s, std::size_t row) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("row " + std::to_string(row) +
                             ": malformed number '" + s + "'");
  }
  return v;
}

}  // namespace

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> columns = {
      "time_s",    "R_m",          "EN_J_per_kg", "H2",        "a_m",
      "eccentricity", "L_orbital", "L_spin",      "E_total_J", "step_s"};
  return columns;
}

std::string format_trajectory_csv(
    std::span<const OrbitalDiagnostics> diagnostics) {
  std::string out;
  const auto& cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out += cols[i];
    out += i + 1 < cols.size() ? ',' : '\n';
  }
  Vec3 axis{0.0, 0.0, 1.0};
  if (!diagnostics.empty()) {
    const Vec3 l = diagnostics.front().total_angular_momentum;
    if (norm(l) > 0.0) axis = l / norm(l);
  }
  for (const auto& d : diagnostics) {
    const double row[] = {d.time,
                          d.distance,
                          d.specific_energy,
                          d.angular_momentum_sq,
                          d.semi_major_axis,
                          d.eccentricity,
                          dot(d.orbital_angular_momentum, axis),
                          dot(d.spin_angular_momentum, axis),
                          d.total_mechanical_energy,
                          d.step};
    for (std::size_t i = 0; i < std::size(row); ++i) {
      out += format_double(row[i]);
      out += i + 1 < std::size(row) ? ',' : '\n';
    }
  }
  return out;
}

std::vector<OrbitalDiagnostics> parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file");
  const auto header = split(line, ',');
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
  std::string missing;
  for (const auto& c : trajectory_columns()) {
    if (!index.contains(c)) missing += (missing.empty() ? "" : ", ") + c;
  }
  if (!missing.empty()) {
    throw std::runtime_error("trajectory is missing columns: " + missing);
  }

  std::vector<OrbitalDiagnostics> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) {
      throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " fields");
    }
    auto col = [&](const char* name) { return to_double(f[index[name]], row); };
    OrbitalDiagnostics d;
    d.time = col("time_s");
    d.distance = col("R_m");
    d.specific_energy = col("EN_J_per_kg");
    d.angular_momentum_sq = col("H2");
    d.semi_major_axis = col("a_m");
    d.eccentricity = col("eccentricity");
    d.bound = d.specific_energy < 0.0;
    const double lo = col("L_orbital");
    const double ls = col("L_spin");
    d.orbital_angular_momentum = {0.0, 0.0, lo};
    d.spin_angular_momentum = {0.0, 0.0, ls};
    d.total_angular_momentum = {0.0, 0.0, lo + ls};
    d.total_mechanical_energy = col("E_total_J");
    d.step = col("step_s");
    out.push_back(d);
  }
  return out;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const OrbitalDiagnostics> diagnostics) {
  write_file_atomic(path, format_trajectory_csv(diagnostics));
}

std::vector<OrbitalDiagnostics> read_trajectory_csv(
    const std::filesystem::path& path) {
  try {
    return parse_trajectory_csv(read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::string format_bodies_csv(std::span<const SystemState> states, int origin) {
  std::string out = "time_s,body,x_m,y_m,z_m,vx_m_per_s,vy_m_per_s,vz_m_per_s\n";
  for (const auto& s : states) {
    if (origin < 1 || static_cast<std::size_t>(origin) > s.bodies.size()) {
      throw std::out_of_range("origin body out of range");
    }
    const BodyState& o = s.bodies[static_cast<std::size_t>(origin - 1)];
    for (std::size_t i = 0; i < s.bodies.size(); ++i) {
      const Vec3 p = s.bodies[i].position - o.position;
      const Vec3 v = s.bodies[i].velocity - o.velocity;
      out += format_double(s.time) + ',' + std::to_string(i + 1);
      for (double x : {p.x, p.y, p.z, v.x, v.y, v.z}) {
        out += ',';
        out += format_double(x);
      }
      out += '\n';
    }
  }
  return out;
}

void emit_plot_data(std::span<const OrbitalDiagnostics> diagnostics,
                    const std::filesystem::path& directory,
                    const std::string& stem) {
  if (diagnostics.empty()) throw std::runtime_error("trajectory is empty");
  std::filesystem::create_directories(directory);
  std::string data = "# time_s eccentricity R_m\n";
  for (const auto& d : diagnostics) {
    data += format_double(d.time) + ' ' + format_double(d.eccentricity) + ' ' +
            format_double(d.distance) + '\n';
  }
  write_file_atomic(directory / (stem + ".dat"), data);
  std::ostringstream gp;
  gp << "set terminal pngcairo size 1000,600\n"
     << "set output '" << stem << ".png'\n"
     << "set xlabel 'time (s)'\n"
     << "set ylabel 'eccentricity'\n"
     << "set y2label 'R (m)'\n"
     << "set y2tics\n"
     << "plot '" << stem << ".dat' using 1:2 with lines title 'eccentricity', \\\n"
     << "     '' using 1:3 axes x1y2 with lines title 'R'\n";
  write_file_atomic(directory / (stem + ".gp"), gp.str());
}

}  // namespace tidal
