#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tidal/model.hpp"
#include "tidal/vec3.hpp"

namespace tidal {

/// Satellite centroid relative to the planet.
struct RelativeState {
  Vec3 position;
  Vec3 velocity;
};

RelativeState relative_state(const SystemState& state);

/// Mass-weighted centroid of the satellite bodies (all but the planet).
BodyState satellite_centroid(const SystemState& state);

double total_mass(const SystemState& state);

struct OrbitalElements {
  double distance = 0.0;             // R
  double specific_energy = 0.0;      // EN
  double angular_momentum_sq = 0.0;  // H2
  double semi_major_axis = 0.0;      // NaN when unbound
  double eccentricity = 0.0;         // NaN when unbound
  bool bound = true;
};

/// Osculating elements of the relative orbit for mu = G * total_mass, where
/// total_mass is the mass of every body in the system (planet included).
OrbitalElements orbital_elements(const Vec3& r, const Vec3& v,
                                 double total_mass,
                                 const PhysicalConstants& constants);

struct AngularMomentumSplit {
  Vec3 orbital;  // satellite mass x (r x v) of the centroid about the planet
  Vec3 spin;     // satellite bodies about their centroid
  Vec3 frame;    // remainder from the planet's own motion about the origin
  Vec3 total() const { return orbital + spin + frame; }
};

AngularMomentumSplit spin_orbit_decomposition(const SystemState& state);

/// Sum of m_i (x_i x v_i) about the coordinate origin.
Vec3 total_angular_momentum(const SystemState& state);

/// Kinetic energy, all-pairs gravitational potential and spring potential.
double total_mechanical_energy(const SystemState& state,
                               std::span<const Spring> springs,
                               const PhysicalConstants& constants);

OrbitalDiagnostics compute_diagnostics(const SystemState& state,
                                       std::span<const Spring> springs,
                                       const PhysicalConstants& constants);

/// Keplerian period for semi-major axis a about mu.
double orbital_period(double semi_major_axis, double mu);

struct SeriesPoint {
  double time = 0.0;
  double value = 0.0;
};

struct SpikeEvent {
  double time = 0.0;
  double peak_eccentricity = 0.0;
  double baseline_eccentricity = 0.0;
  double width = 0.0;
  double window_start = 0.0;  // first sample above threshold
  double window_end = 0.0;    // last sample above threshold
};

struct SpikeOptions {
  double baseline_window = 0.0;  // s; one orbital period
  double prominence_factor = 5.0;  // multiples of the series' MAD
};

struct SpikeDetection {
  std::vector<SpikeEvent> events;
  bool series_too_short = false;
  double threshold = 0.0;  // absolute prominence threshold applied
};

/// A spike is a maximal run of samples whose excess over the running median
/// (window of baseline_window seconds) exceeds prominence_factor x MAD of the
/// whole series; the event sits at the run's highest sample.
SpikeDetection detect_spikes(std::span<const SeriesPoint> series,
                             const SpikeOptions& options);

double median(std::vector<double> values);
double median_absolute_deviation(std::span<const double> values);

/// Indices of strict local minima of values.
std::vector<std::size_t> local_minima(std::span<const double> values);

std::vector<SeriesPoint> eccentricity_series(
    std::span<const OrbitalDiagnostics> diagnostics);

/// Pearson correlation; nullopt when either input has zero variance or
/// fewer than two samples.
std::optional<double> correlation(std::span<const double> a,
                                  std::span<const double> b);

/// Correlation between successive increments of the orbit-normal
/// components of orbital and spin angular momentum, over samples with
/// time in [start, end].
std::optional<double> spin_orbit_increment_correlation(
    std::span<const OrbitalDiagnostics> diagnostics, double start, double end);

}  // namespace tidal
