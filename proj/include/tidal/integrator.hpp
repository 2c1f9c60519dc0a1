#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tidal/forces.hpp"
#include "tidal/model.hpp"

namespace tidal {

/// dy/dt = f(y) for a flat first-order system.
using DerivativeFn =
    std::function<void(std::span<const double> y, std::span<double> dydt)>;

/// Accelerations from flat positions and velocities ([x0, y0, z0, x1, ...]).
using AccelerationFn = std::function<void(std::span<const double> positions,
                                          std::span<const double> velocities,
                                          std::span<double> accelerations)>;

AccelerationFn make_acceleration_fn(const AccelerationField& field);

/// Classical four-stage Runge-Kutta on a first-order system. Reuses its
/// stage buffers across calls.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(std::size_t dimension);

  /// out = y advanced by h. out must not alias y.
  void step(std::span<const double> y, double h, const DerivativeFn& f,
            std::span<double> out);

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// Phase vector [positions..., velocities...] for the bodies of a state.
std::vector<double> pack_phase(const SystemState& state);
void unpack_phase(std::span<const double> phase, SystemState& state);

SystemState rk4_step(const SystemState& state, double h,
                     const AccelerationFn& acceleration);

class StepUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepController {
  double current_step = 10.0;
  double tolerance = 100.0;
  double min_step = 1e-6;
  double max_step = 1250.0;
  long accepted_count = 0;
  long rejected_count = 0;
};

struct StepOutcome {
  bool accepted = false;
  double error_estimate = 0.0;  // max |difference| over positional coordinates
  double new_step = 0.0;
};

struct AdvanceResult {
  SystemState state;
  StepOutcome outcome;
  StepController controller;
};

/// One step-doubling attempt with h = controller.current_step: two steps of
/// h are compared with one step of 2h. Accepted results keep the two-step
/// solution and double the step (capped at max_step); rejected attempts
/// return the input state and halve the step. Throws StepUnderflow when a
/// rejection happens at min_step.
AdvanceResult adaptive_advance(const SystemState& state,
                               const StepController& controller,
                               const AccelerationFn& acceleration);

struct RunOptions {
  /// Positional perturbation applied to the satellite after every accepted
  /// step, in metres, directed to decrease the osculating eccentricity.
  double fault_injection = 0.0;
  /// Disables the inverse-square interaction (free motion plus springs).
  bool long_range_forces = true;
  double min_step = 1e-6;
  /// Zero selects total_simulation_time / 100.
  double max_step = 0.0;
  bool keep_states = true;
};

/// Integrates the configured scenario from build_initial_state to
/// total_simulation_time, sampling on the grid k * output_interval and at
/// the final time. Steps are shortened to land exactly on sample times.
Trajectory run(const SimulationConfig& config, const RunOptions& options = {});

/// Unit vector along which a small centroid displacement decreases the
/// osculating eccentricity fastest (zero for a circular or degenerate orbit).
Vec3 eccentricity_descent_direction(const Vec3& r, const Vec3& v, double mu);

}  // namespace tidal
