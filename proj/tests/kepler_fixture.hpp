#pragma once

// Fixed-step RK4 on the two-body reference orbit, for order checks.

#include <cmath>
#include <numbers>

#include "tidal/diagnostics.hpp"
#include "tidal/forces.hpp"
#include "tidal/integrator.hpp"
#include "tidal/model.hpp"

namespace tidal::testing {

// Position error of the relative orbit after exactly one period, integrated
// with `steps` equal RK4 steps.
inline double kepler_period_error(int steps) {
  SimulationConfig cfg = reference_config();
  cfg.number_of_bodies = 2;
  const InitialConditions ic = build_initial_state(cfg);
  const double mu = cfg.constants.gravitational_constant * total_mass(ic.state);
  const auto d0 = compute_diagnostics(ic.state, ic.springs, cfg.constants);
  const double period = orbital_period(d0.semi_major_axis, mu);

  const AccelerationField field({ic.state.bodies[0].mass, ic.state.bodies[1].mass},
                                {}, ForceLaw::gravity(cfg.constants.gravitational_constant));
  const AccelerationFn accel = make_acceleration_fn(field);
  SystemState s = ic.state;
  const double h = period / steps;
  for (int i = 0; i < steps; ++i) s = rk4_step(s, h, accel);
  const Vec3 start = ic.state.bodies[0].position - ic.state.bodies[1].position;
  const Vec3 end = s.bodies[0].position - s.bodies[1].position;
  return norm(end - start);
}

}  // namespace tidal::testing
