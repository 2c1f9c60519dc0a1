#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tidal/model.hpp"

namespace tidal {

/// Column names of the diagnostics CSV, in order.
const std::vector<std::string>& trajectory_columns();

/// Diagnostics as CSV. Angular momenta are projected on the direction of the
/// total angular momentum of the first sample.
std::string format_trajectory_csv(std::span<const OrbitalDiagnostics> diagnostics);

/// Inverse of format_trajectory_csv. The projected angular momenta come back
/// as z components. Throws std::runtime_error naming any missing column.
std::vector<OrbitalDiagnostics> parse_trajectory_csv(const std::string& text);

void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const OrbitalDiagnostics> diagnostics);
std::vector<OrbitalDiagnostics> read_trajectory_csv(
    const std::filesystem::path& path);

/// Body positions and velocities relative to body `origin` (1-based), one row
/// per body per state.
std::string format_bodies_csv(std::span<const SystemState> states, int origin);

/// Writes `<stem>.dat` (time, eccentricity, distance) and a gnuplot script
/// `<stem>.gp` into `directory`. Throws if the trajectory is empty.
void emit_plot_data(std::span<const OrbitalDiagnostics> diagnostics,
                    const std::filesystem::path& directory,
                    const std::string& stem = "eccentricity");

}  // namespace tidal
