#include "tidal/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tidal {

double default_spring_constant(double mass_of_satellite) {
  const double reduced_mass = (mass_of_satellite / 3.0) / 2.0;
  const double omega = 2.0 * std::numbers::pi / kDefaultSpringPeriod;
  return reduced_mass * omega * omega;
}

double default_damping_coefficient(double spring_constant,
                                   double mass_of_satellite) {
  return kDefaultDampingFraction *
         std::sqrt(spring_constant * mass_of_satellite / 3.0);
}

SimulationConfig reference_config() {
  SimulationConfig config;
  config.spring_constant = default_spring_constant(config.mass_of_satellite);
  config.damping_coefficient = default_damping_coefficient(
      config.spring_constant, config.mass_of_satellite);
  return config;
}

namespace {

void require_positive(std::vector<Violation>& out, const char* field,
                      double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    out.push_back({field, std::string(field) + " must be positive"});
  }
}

}  // namespace

ValidationResult validate_config(const SimulationConfig& c) {
  ValidationResult result;
  auto& v = result.violations;

  if (c.number_of_bodies != 4 && c.number_of_bodies != 2) {
    v.push_back({"number_of_bodies",
                 "number_of_bodies must be 4 (planet + three-mass satellite) "
                 "or 2 (planet + point satellite)"});
  }
  require_positive(v, "mass_of_planet", c.mass_of_planet);
  require_positive(v, "mass_of_satellite", c.mass_of_satellite);
  require_positive(v, "initial_time_step", c.initial_time_step);
  if (!(c.total_simulation_time >= 0.0) ||
      !std::isfinite(c.total_simulation_time)) {
    v.push_back({"total_simulation_time",
                 "total_simulation_time must be non-negative"});
  }
  if (c.body_chosen_as_origin < 1 ||
      c.body_chosen_as_origin > c.number_of_bodies) {
    v.push_back({"body_chosen_as_origin",
                 "body_chosen_as_origin must be between 1 and "
                 "number_of_bodies"});
  }
  require_positive(v, "tolerance", c.tolerance);
  require_positive(v, "initial_distance_of_satellite",
                   c.initial_distance_of_satellite);
  require_positive(v, "unstretched_length_of_spring",
                   c.unstretched_length_of_spring);
  if (!(c.initial_eccentricity >= 0.0)) {
    v.push_back({"initial_eccentricity",
                 "eccentricity must be >= 0"});
  } else if (!(c.initial_eccentricity < 1.0)) {
    v.push_back({"initial_eccentricity", "eccentricity must be < 1"});
  }
  if (c.number_of_bodies == 4) {
    require_positive(v, "spring_constant", c.spring_constant);
    if (!(c.damping_coefficient >= 0.0) ||
        !std::isfinite(c.damping_coefficient)) {
      v.push_back({"damping_coefficient",
                   "damping_coefficient must be non-negative"});
    }
  }
  require_positive(v, "output_interval", c.output_interval);
  require_positive(v, "gravitational_constant",
                   c.constants.gravitational_constant);

  if (c.unstretched_length_of_spring > 0.0 &&
      c.initial_distance_of_satellite > 0.0 &&
      c.unstretched_length_of_spring >
          kMaxSpringToOrbitRatio * c.initial_distance_of_satellite) {
    std::ostringstream msg;
    msg << "unstretched_length_of_spring must be at most "
        << kMaxSpringToOrbitRatio << " x initial_distance_of_satellite";
    v.push_back({"unstretched_length_of_spring", msg.str()});
  }
  return result;
}

double apoapsis_speed(double mu, double r_apo, double eccentricity) {
  const double a = r_apo / (1.0 + eccentricity);
  return std::sqrt(mu * (2.0 / r_apo - 1.0 / a));
}

InitialConditions build_initial_state(const SimulationConfig& config) {
  const auto check = validate_config(config);
  if (!check.ok()) {
    std::string msg = "invalid configuration:";
    for (const auto& violation : check.violations) {
      msg += "\n  " + violation.message;
    }
    throw ConfigError(msg);
  }

  const double G = config.constants.gravitational_constant;
  const double M = config.mass_of_planet;
  const double m = config.mass_of_satellite;
  const double r0 = config.initial_distance_of_satellite;
  const double speed =
      apoapsis_speed(G * (M + m), r0, config.initial_eccentricity);
  const Vec3 centroid_velocity{0.0, speed, 0.0};

  InitialConditions ic;
  ic.state.time = 0.0;

  if (config.number_of_bodies == 2) {
    ic.state.bodies.push_back({{r0, 0.0, 0.0}, centroid_velocity, m});
  } else {
    // Equilateral triangle with centroid at (r0, 0, 0): apex outward on the
    // x axis, base perpendicular to it.
    const double side = config.unstretched_length_of_spring;
    const double height = side * std::sqrt(3.0) / 2.0;
    // Snap the radial offset to the spacing of doubles near r0 so that the
    // vertex coordinates are exact and the centroid lands on r0.
    const double grid = std::nextafter(r0, 2.0 * r0) - r0;
    const double third = std::round(height / 3.0 / grid) * grid;
    const std::vector<Vec3> offsets = {
        {2.0 * third, 0.0, 0.0},
        {-third, side / 2.0, 0.0},
        {-third, -side / 2.0, 0.0},
    };
    for (const auto& offset : offsets) {
      ic.state.bodies.push_back(
          {Vec3{r0, 0.0, 0.0} + offset, centroid_velocity, m / 3.0});
    }
    const std::pair<std::size_t, std::size_t> pairs[] = {{0, 1}, {1, 2}, {2, 0}};
    for (const auto& [a, b] : pairs) {
      const double length =
          norm(ic.state.bodies[a].position - ic.state.bodies[b].position);
      ic.springs.push_back({a, b, length, config.spring_constant,
                            config.damping_coefficient});
    }
  }
  ic.state.bodies.push_back({{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, M});
  return ic;
}

std::size_t Trajectory::accepted_steps() const {
  return static_cast<std::size_t>(std::count_if(
      step_log.begin(), step_log.end(),
      [](const StepRecord& r) { return r.accepted; }));
}

std::size_t Trajectory::rejected_steps() const {
  return step_log.size() - accepted_steps();
}

}  // namespace tidal
