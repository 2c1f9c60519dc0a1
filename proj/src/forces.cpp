#include "tidal/forces.hpp"

#include <cmath>
#include <string>

namespace tidal {

double spring_axial_force(double current_length, double length_rate,
                          const Spring& spring) {
  return spring.stiffness * (current_length - spring.rest_length) +
         spring.damping * length_rate;
}

namespace {

// Force on i from j given the separation d = x_j - x_i.
Vec3 inverse_square(const Vec3& d, double source_i, double source_j,
                    const ForceLaw& law) {
  const double r2 = norm_sq(d);
  if (!(r2 > 0.0) || !std::isfinite(r2)) {
    throw SingularityError("coincident or non-finite body separation");
  }
  const double r3 = r2 * std::sqrt(r2);
  double strength = law.coupling * (source_i * source_j) / r3;
  if (law.kind == ForceLaw::Kind::inverse_square_coulomb) strength = -strength;
  return d * strength;
}

}  // namespace

Vec3 pairwise_long_range_force(const BodyState& body_i,
                               const BodyState& body_j, const ForceLaw& law) {
  return inverse_square(body_j.position - body_i.position, body_i.mass,
                        body_j.mass, law);
}

AccelerationField::AccelerationField(std::vector<double> masses,
                                     std::vector<Spring> springs, ForceLaw law,
                                     bool long_range_enabled)
    : masses_(std::move(masses)),
      springs_(std::move(springs)),
      law_(law),
      long_range_enabled_(long_range_enabled) {
  for (const auto& s : springs_) {
    if (s.endpoint_a >= masses_.size() || s.endpoint_b >= masses_.size() ||
        s.endpoint_a == s.endpoint_b) {
      throw std::invalid_argument("spring references an invalid body pair");
    }
  }
}

void AccelerationField::evaluate(std::span<const double> positions,
                                 std::span<const double> velocities,
                                 std::span<double> accelerations) const {
  const std::size_t n = masses_.size();
  auto at = [](std::span<const double> flat, std::size_t i) {
    return Vec3{flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]};
  };

  // Accumulate forces first, then divide by mass.
  std::vector<Vec3> force(n);
  if (long_range_enabled_) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Vec3 xi = at(positions, i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec3 f =
            inverse_square(at(positions, j) - xi, masses_[i], masses_[j], law_);
        force[i] += f;
        force[j] -= f;
      }
    }
  }
  for (const auto& s : springs_) {
    const Vec3 dx = at(positions, s.endpoint_b) - at(positions, s.endpoint_a);
    const double length = norm(dx);
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw SingularityError("spring collapsed to zero length");
    }
    const Vec3 axis = dx / length;
    const Vec3 dv = at(velocities, s.endpoint_b) - at(velocities, s.endpoint_a);
    const Vec3 f = axis * spring_axial_force(length, dot(dv, axis), s);
    force[s.endpoint_a] += f;
    force[s.endpoint_b] -= f;
  }
  for (std::size_t i = 0; i < n; ++i) {
    accelerations[3 * i] = force[i].x / masses_[i];
    accelerations[3 * i + 1] = force[i].y / masses_[i];
    accelerations[3 * i + 2] = force[i].z / masses_[i];
  }
}

std::vector<Vec3> total_acceleration(const SystemState& state,
                                     const std::vector<Spring>& springs,
                                     const ForceLaw& law) {
  const std::size_t n = state.bodies.size();
  std::vector<double> masses(n), pos(3 * n), vel(3 * n), acc(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = state.bodies[i];
    masses[i] = b.mass;
    pos[3 * i] = b.position.x;
    pos[3 * i + 1] = b.position.y;
    pos[3 * i + 2] = b.position.z;
    vel[3 * i] = b.velocity.x;
    vel[3 * i + 1] = b.velocity.y;
    vel[3 * i + 2] = b.velocity.z;
  }
  AccelerationField(std::move(masses), springs, law).evaluate(pos, vel, acc);
  std::vector<Vec3> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {acc[3 * i], acc[3 * i + 1], acc[3 * i + 2]};
  }
  return out;
}

SpringKinematics spring_kinematics(const SystemState& state,
                                   const Spring& spring) {
  const auto& a = state.bodies.at(spring.endpoint_a);
  const auto& b = state.bodies.at(spring.endpoint_b);
  const Vec3 dx = b.position - a.position;
  const double length = norm(dx);
  const double rate = length > 0.0 ? dot(b.velocity - a.velocity, dx) / length
                                   : 0.0;
  return {length, rate};
}

}  // namespace tidal
