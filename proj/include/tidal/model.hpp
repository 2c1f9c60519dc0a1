#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "tidal/vec3.hpp"

namespace tidal {

struct PhysicalConstants {
  double gravitational_constant = 6.667e-11;  // m^3 kg^-1 s^-2
};

/// Inputs of one tidal-satellite run. Masses in kg, lengths in m, times in s.
///
/// Bodies 1..n-1 are satellite components and body n is the planet. With
/// number_of_bodies = 4 the satellite is the three-mass spring triangle; with
/// number_of_bodies = 2 it is a single point mass (the pure two-body problem).
struct SimulationConfig {
  int number_of_bodies = 4;
  double mass_of_planet = 2e27;
  double mass_of_satellite = 3e22;
  double initial_time_step = 10.0;
  double total_simulation_time = 125000.0;
  int body_chosen_as_origin = 1;
  double tolerance = 100.0;
  double initial_distance_of_satellite = 1e8;
  double unstretched_length_of_spring = 1e6;
  double initial_eccentricity = 0.6;
  double spring_constant = 0.0;      // N/m
  double damping_coefficient = 0.0;  // N s/m
  double output_interval = 100.0;  // s, diagnostics sampling grid
  PhysicalConstants constants{};
};

/// Period of the two-mass spring oscillation the default stiffness targets.
inline constexpr double kDefaultSpringPeriod = 300.0;
/// Default damping as a fraction of sqrt(k * m/3).
inline constexpr double kDefaultDampingFraction = 0.01;
inline constexpr double kMaxSpringToOrbitRatio = 0.1;

/// Stiffness giving two masses of m/3 joined by one spring the oscillation
/// period kDefaultSpringPeriod.
double default_spring_constant(double mass_of_satellite);
double default_damping_coefficient(double spring_constant,
                                   double mass_of_satellite);

/// The parameter set of the reference tidal-stress scenario, with k and c at
/// their defaults.
SimulationConfig reference_config();

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationResult validate_config(const SimulationConfig& config);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BodyState {
  Vec3 position;
  Vec3 velocity;
  double mass = 0.0;
};

struct SystemState {
  double time = 0.0;
  std::vector<BodyState> bodies;

  std::size_t planet_index() const { return bodies.size() - 1; }
  std::size_t satellite_count() const { return bodies.size() - 1; }
};

/// Spring between two satellite bodies (0-based indices).
struct Spring {
  std::size_t endpoint_a = 0;
  std::size_t endpoint_b = 0;
  double rest_length = 0.0;
  double stiffness = 0.0;
  double damping = 0.0;
};

struct InitialConditions {
  SystemState state;
  std::vector<Spring> springs;
};

/// Places the planet at rest at the origin and the satellite centroid at
/// apoapsis on +x, moving along +y with the speed that gives the configured
/// eccentricity for mu = G (M + m). The triangle lies in the orbital plane,
/// one vertex on the far side of the planet-centroid line, with zero spin.
/// Spring rest lengths are the constructed side lengths, so every spring is
/// exactly unstressed at t = 0. Throws ConfigError on an invalid config.
InitialConditions build_initial_state(const SimulationConfig& config);

/// Speed at apoapsis r_apo of an orbit with eccentricity e around mu.
double apoapsis_speed(double mu, double r_apo, double eccentricity);

struct OrbitalDiagnostics {
  double time = 0.0;
  double distance = 0.0;         // R, m
  double specific_energy = 0.0;  // EN, J/kg
  double angular_momentum_sq = 0.0;  // H2, m^4/s^2
  double semi_major_axis = 0.0;  // NaN when unbound
  double eccentricity = 0.0;     // NaN when unbound
  bool bound = true;
  Vec3 orbital_angular_momentum;  // kg m^2/s
  Vec3 spin_angular_momentum;     // kg m^2/s
  Vec3 total_angular_momentum;    // kg m^2/s, about the origin
  double total_mechanical_energy = 0.0;  // J
  double step = 0.0;  // step length in use when the sample was taken, s
};

struct StepRecord {
  double time = 0.0;  // time at the start of the attempt
  double step = 0.0;  // h; an attempt spans 2h
  double error_estimate = 0.0;
  bool accepted = false;
};

struct Trajectory {
  std::vector<SystemState> states;
  std::vector<OrbitalDiagnostics> diagnostics;
  std::vector<StepRecord> step_log;
  std::vector<Spring> springs;
  /// Sum over accepted steps of the eccentricity change caused by fault
  /// injection, evaluated at each injection. Zero when injection is off.
  double injected_eccentricity_change = 0.0;

  std::size_t accepted_steps() const;
  std::size_t rejected_steps() const;
};

}  // namespace tidal
