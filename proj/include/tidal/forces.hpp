#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "tidal/model.hpp"
#include "tidal/vec3.hpp"

namespace tidal {

/// Long-range pair interaction. For gravity the body masses are the sources;
/// for the Coulomb variant the same slots are read as charges, and like
/// charges repel.
struct ForceLaw {
  enum class Kind { inverse_square_gravity, inverse_square_coulomb };

  Kind kind = Kind::inverse_square_gravity;
  double coupling = 6.667e-11;

  static ForceLaw gravity(double G) {
    return {Kind::inverse_square_gravity, G};
  }
  static ForceLaw coulomb(double coulomb_constant) {
    return {Kind::inverse_square_coulomb, coulomb_constant};
  }
};

/// Two bodies share a position, or a separation became non-finite.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axial spring force with hysteresis damping, positive when it pulls the
/// two ends inward: k (l' - l) + c dl'/dt. The damping term opposes the
/// rate of extension, so it always removes mechanical energy.
double spring_axial_force(double current_length, double length_rate,
                          const Spring& spring);

/// Force exerted on body_i by body_j. Throws SingularityError when the two
/// positions coincide.
Vec3 pairwise_long_range_force(const BodyState& body_i,
                               const BodyState& body_j, const ForceLaw& law);

/// Acceleration field of the tidal system, evaluated on flat coordinate
/// arrays laid out as [x0, y0, z0, x1, ...].
class AccelerationField {
 public:
  AccelerationField(std::vector<double> masses, std::vector<Spring> springs,
                    ForceLaw law, bool long_range_enabled = true);

  std::size_t body_count() const { return masses_.size(); }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<Spring>& springs() const { return springs_; }
  const ForceLaw& law() const { return law_; }

  void evaluate(std::span<const double> positions,
                std::span<const double> velocities,
                std::span<double> accelerations) const;

 private:
  std::vector<double> masses_;
  std::vector<Spring> springs_;
  ForceLaw law_;
  bool long_range_enabled_;
};

std::vector<Vec3> total_acceleration(const SystemState& state,
                                     const std::vector<Spring>& springs,
                                     const ForceLaw& law);

/// Current spring length and its rate of change (relative velocity
/// projected on the spring axis).
struct SpringKinematics {
  double length = 0.0;
  double rate = 0.0;
};

SpringKinematics spring_kinematics(const SystemState& state,
                                   const Spring& spring);

}  // namespace tidal
