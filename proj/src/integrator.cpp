#include "tidal/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "tidal/diagnostics.hpp"
#include "tidal/kernels.hpp"

namespace tidal {

AccelerationFn make_acceleration_fn(const AccelerationField& field) {
  return [&field](std::span<const double> pos, std::span<const double> vel,
                  std::span<double> acc) { field.evaluate(pos, vel, acc); };
}

Rk4Stepper::Rk4Stepper(std::size_t dimension)
    : k1_(dimension), k2_(dimension), k3_(dimension), k4_(dimension),
      tmp_(dimension) {}

void Rk4Stepper::step(std::span<const double> y, double h,
                      const DerivativeFn& f, std::span<double> out) {
  f(y, k1_);
  kernels::axpy(tmp_, y, 0.5 * h, k1_);
  f(tmp_, k2_);
  kernels::axpy(tmp_, y, 0.5 * h, k2_);
  f(tmp_, k3_);
  kernels::axpy(tmp_, y, h, k3_);
  f(tmp_, k4_);
  kernels::rk4_combine(out, y, h, k1_, k2_, k3_, k4_);
}

std::vector<double> pack_phase(const SystemState& state) {
  const std::size_t n = state.bodies.size();
  std::vector<double> phase(6 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = state.bodies[i];
    phase[3 * i] = b.position.x;
    phase[3 * i + 1] = b.position.y;
    phase[3 * i + 2] = b.position.z;
    phase[3 * n + 3 * i] = b.velocity.x;
    phase[3 * n + 3 * i + 1] = b.velocity.y;
    phase[3 * n + 3 * i + 2] = b.velocity.z;
  }
  return phase;
}

void unpack_phase(std::span<const double> phase, SystemState& state) {
  const std::size_t n = state.bodies.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& b = state.bodies[i];
    b.position = {phase[3 * i], phase[3 * i + 1], phase[3 * i + 2]};
    b.velocity = {phase[3 * n + 3 * i], phase[3 * n + 3 * i + 1],
                  phase[3 * n + 3 * i + 2]};
  }
}

namespace {

DerivativeFn second_order(const AccelerationFn& acceleration,
                          std::size_t coordinates) {
  return [&acceleration, coordinates](std::span<const double> y,
                                      std::span<double> dydt) {
    const auto pos = y.first(coordinates);
    const auto vel = y.subspan(coordinates, coordinates);
    std::copy(vel.begin(), vel.end(), dydt.begin());
    acceleration(pos, vel, dydt.subspan(coordinates, coordinates));
  };
}

// Step-doubling attempt on a flat phase vector. Fills `two_steps` with the
// result of two steps of h and returns the positional error estimate.
class DoubleStepper {
 public:
  DoubleStepper(const AccelerationFn& acceleration, std::size_t bodies)
      : coordinates_(3 * bodies),
        f_(second_order(acceleration, coordinates_)),
        rk_(2 * coordinates_),
        mid_(2 * coordinates_),
        big_(2 * coordinates_) {}

  double attempt(std::span<const double> y, double h,
                 std::span<double> two_steps) {
    rk_.step(y, h, f_, mid_);
    rk_.step(mid_, h, f_, two_steps);
    rk_.step(y, 2.0 * h, f_, big_);
    return kernels::max_abs_diff(
        std::span<const double>(two_steps).first(coordinates_),
        std::span<const double>(big_).first(coordinates_));
  }

 private:
  std::size_t coordinates_;
  DerivativeFn f_;
  Rk4Stepper rk_;
  std::vector<double> mid_, big_;
};

// Applies the controller rule to an attempt of step h; mutates controller.
StepOutcome decide(StepController& controller, double h, double error) {
  StepOutcome outcome;
  outcome.error_estimate = error;
  outcome.accepted = error <= controller.tolerance;
  if (outcome.accepted) {
    ++controller.accepted_count;
    outcome.new_step = std::min(2.0 * h, controller.max_step);
  } else {
    ++controller.rejected_count;
    if (h <= controller.min_step) {
      throw StepUnderflow("step rejected at the minimum step length");
    }
    outcome.new_step = std::max(0.5 * h, controller.min_step);
  }
  return outcome;
}

}  // namespace

SystemState rk4_step(const SystemState& state, double h,
                     const AccelerationFn& acceleration) {
  const auto y = pack_phase(state);
  std::vector<double> out(y.size());
  Rk4Stepper rk(y.size());
  rk.step(y, h, second_order(acceleration, y.size() / 2), out);
  SystemState next = state;
  unpack_phase(out, next);
  next.time = state.time + h;
  return next;
}

AdvanceResult adaptive_advance(const SystemState& state,
                               const StepController& controller,
                               const AccelerationFn& acceleration) {
  const double h = controller.current_step;
  const auto y = pack_phase(state);
  std::vector<double> two_steps(y.size());
  DoubleStepper stepper(acceleration, state.bodies.size());
  const double error = stepper.attempt(y, h, two_steps);

  AdvanceResult result{state, {}, controller};
  result.outcome = decide(result.controller, h, error);
  result.controller.current_step = result.outcome.new_step;
  if (result.outcome.accepted) {
    unpack_phase(two_steps, result.state);
    result.state.time = state.time + 2.0 * h;
  }
  return result;
}

Vec3 eccentricity_descent_direction(const Vec3& r, const Vec3& v, double mu) {
  const double R = norm(r);
  const double v2 = norm_sq(v);
  const double energy = -mu / R + 0.5 * v2;
  const double h2 = norm_sq(cross(r, v));
  // d(e^2)/dr at fixed v, from e^2 = 1 + 2 EN H2 / mu^2.
  const Vec3 d_energy = r * (mu / (R * R * R));
  const Vec3 d_h2 = (r * v2 - v * dot(r, v)) * 2.0;
  const Vec3 grad = (d_energy * h2 + d_h2 * energy) * (2.0 / (mu * mu));
  const double g = norm(grad);
  if (!(g > 0.0) || !std::isfinite(g)) return {};
  return -grad / g;
}

Trajectory run(const SimulationConfig& config, const RunOptions& options) {
  InitialConditions ic = build_initial_state(config);
  const PhysicalConstants& constants = config.constants;
  SystemState state = std::move(ic.state);
  const std::size_t bodies = state.bodies.size();

  std::vector<double> masses;
  for (const auto& b : state.bodies) masses.push_back(b.mass);
  const AccelerationField field(masses, ic.springs,
                                ForceLaw::gravity(constants.gravitational_constant),
                                options.long_range_forces);
  const AccelerationFn acceleration = make_acceleration_fn(field);

  Trajectory traj;
  traj.springs = ic.springs;

  const double end_time = config.total_simulation_time;
  StepController controller;
  controller.tolerance = config.tolerance;
  controller.min_step = options.min_step;
  controller.max_step =
      options.max_step > 0.0 ? options.max_step : end_time / 100.0;
  controller.current_step = config.initial_time_step;
  if (controller.max_step > 0.0) {
    controller.current_step =
        std::clamp(controller.current_step, controller.min_step,
                   std::max(controller.min_step, controller.max_step));
  }

  auto record = [&](const SystemState& s) {
    OrbitalDiagnostics d = compute_diagnostics(s, ic.springs, constants);
    d.step = controller.current_step;
    traj.diagnostics.push_back(d);
    if (options.keep_states) traj.states.push_back(s);
  };
  record(state);
  if (!(end_time > 0.0)) return traj;

  std::vector<double> y = pack_phase(state);
  std::vector<double> next(y.size());
  DoubleStepper stepper(acceleration, bodies);
  const double mu = constants.gravitational_constant * total_mass(state);
  const std::size_t satellites = state.satellite_count();

  long sample_index = 1;
  double t = 0.0;
  while (t < end_time) {
    const double sample_time =
        std::min(static_cast<double>(sample_index) * config.output_interval,
                 end_time);
    const double natural = controller.current_step;
    double h = natural;
    const bool landing = t + 2.0 * h >= sample_time;
    if (landing) h = 0.5 * (sample_time - t);

    const double error = stepper.attempt(y, h, next);
    const StepOutcome outcome = decide(controller, h, error);
    traj.step_log.push_back({t, h, error, outcome.accepted});
    if (!outcome.accepted) {
      controller.current_step = outcome.new_step;
      continue;
    }
    controller.current_step = landing ? natural : outcome.new_step;
    y.swap(next);
    t = landing ? sample_time : t + 2.0 * h;

    if (options.fault_injection != 0.0) {
      unpack_phase(y, state);
      state.time = t;
      const RelativeState rel = relative_state(state);
      const Vec3 shift =
          eccentricity_descent_direction(rel.position, rel.velocity, mu) *
          options.fault_injection;
      const double before =
          orbital_elements(rel.position, rel.velocity, total_mass(state),
                           constants).eccentricity;
      for (std::size_t i = 0; i < satellites; ++i) {
        y[3 * i] += shift.x;
        y[3 * i + 1] += shift.y;
        y[3 * i + 2] += shift.z;
      }
      unpack_phase(y, state);
      const RelativeState moved = relative_state(state);
      const double after =
          orbital_elements(moved.position, moved.velocity, total_mass(state),
                           constants).eccentricity;
      traj.injected_eccentricity_change += after - before;
    }

    if (landing) {
      unpack_phase(y, state);
      state.time = t;
      record(state);
      ++sample_index;
    }
  }
  return traj;
}

}  // namespace tidal
