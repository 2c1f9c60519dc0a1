#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "tidal/diagnostics.hpp"
#include "tidal/forces.hpp"

using namespace tidal;

namespace {

double& component(Vec3& v, int axis) {
  return axis == 0 ? v.x : axis == 1 ? v.y : v.z;
}

}  // namespace

TEST(Gravity, PlanetSatelliteOracle) {
  const BodyState planet{{0, 0, 0}, {}, 2e27};
  const BodyState satellite{{1e8, 0, 0}, {}, 3e22};
  const auto law = ForceLaw::gravity(6.667e-11);
  const Vec3 f = pairwise_long_range_force(satellite, planet, law);
  // G M m / r^2, pointing at the planet.
  EXPECT_NEAR(f.x, -4.0002e23, 4.0002e23 * 1e-12);
  EXPECT_EQ(f.y, 0.0);
  EXPECT_EQ(f.z, 0.0);
  const auto acc = total_acceleration({0.0, {satellite, planet}}, {}, law);
  EXPECT_NEAR(acc[0].x, -13.334, 1e-10);
}

TEST(Gravity, PairwiseForceIsExactlyAntisymmetric) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-1e9, 1e9);
  std::uniform_real_distribution<double> mass(1e10, 1e30);
  const auto law = ForceLaw::gravity(6.667e-11);
  for (int i = 0; i < 1000; ++i) {
    const BodyState a{{pos(rng), pos(rng), pos(rng)}, {}, mass(rng)};
    const BodyState b{{pos(rng), pos(rng), pos(rng)}, {}, mass(rng)};
    const Vec3 fab = pairwise_long_range_force(a, b, law);
    const Vec3 fba = pairwise_long_range_force(b, a, law);
    EXPECT_EQ(fab, -fba);
  }
}

TEST(Gravity, CoulombLikeChargesRepel) {
  const BodyState a{{0, 0, 0}, {}, 1.0};
  const BodyState b{{2, 0, 0}, {}, 1.0};
  const Vec3 attract = pairwise_long_range_force(a, b, ForceLaw::gravity(1.0));
  const Vec3 repel = pairwise_long_range_force(a, b, ForceLaw::coulomb(1.0));
  EXPECT_DOUBLE_EQ(attract.x, 0.25);
  EXPECT_DOUBLE_EQ(repel.x, -0.25);
  const BodyState c{{2, 0, 0}, {}, -1.0};
  EXPECT_DOUBLE_EQ(pairwise_long_range_force(a, c, ForceLaw::coulomb(1.0)).x, 0.25);
}

TEST(Gravity, CoincidentBodiesThrow) {
  const BodyState a{{1, 2, 3}, {}, 1.0};
  EXPECT_THROW(pairwise_long_range_force(a, a, ForceLaw::gravity(1.0)),
               SingularityError);
}

TEST(Spring, AxialForceLaw) {
  Spring s{0, 1, 10.0, 10.0, 5.0};
  EXPECT_EQ(spring_axial_force(12.0, 0.0, s), 20.0);   // stretched: pulls ends in
  EXPECT_EQ(spring_axial_force(8.0, 0.0, s), -20.0);   // compressed: pushes out
  // Damping opposes the motion of the ends: an extending spring pulls inward.
  EXPECT_EQ(spring_axial_force(10.0, 2.0, s), 10.0);
  EXPECT_EQ(spring_axial_force(10.0, -2.0, s), -10.0);
}

TEST(Spring, DampingNeverAddsPower) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Spring s{0, 1, 1.0, 0.0, 2.5};
  const AccelerationField field({1.0, 1.0}, {s}, ForceLaw::gravity(0.0), false);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> pos{u(rng), u(rng), u(rng), 3 + u(rng), u(rng), u(rng)};
    const std::vector<double> vel{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    std::vector<double> acc(6);
    field.evaluate(pos, vel, acc);
    double power = 0.0;
    for (int k = 0; k < 6; ++k) power += acc[k] * vel[k];  // unit masses
    EXPECT_LE(power, 1e-15);
  }
}

TEST(Field, ForceIsMinusPotentialGradient) {
  // Undamped field: central finite differences of the total potential.
  auto cfg = reference_config();
  cfg.damping_coefficient = 0.0;
  auto ic = build_initial_state(cfg);
  // Stretch one vertex so the springs carry load.
  ic.state.bodies[0].position += Vec3{3e4, -2e4, 1e4};
  const auto law = ForceLaw::gravity(cfg.constants.gravitational_constant);
  const auto acc = total_acceleration(ic.state, ic.springs, law);

  auto potential = [&](const SystemState& s) {
    SystemState still = s;
    for (auto& b : still.bodies) b.velocity = {};
    return total_mechanical_energy(still, ic.springs, cfg.constants);
  };
  // Potential ~3e31 J carries ~3e15 J of rounding; h keeps that small
  // against forces of order 1e22 N.
  const double h = 10.0;
  for (std::size_t body = 0; body < 3; ++body) {
    for (int axis = 0; axis < 3; ++axis) {
      SystemState plus = ic.state, minus = ic.state;
      component(plus.bodies[body].position, axis) += h;
      component(minus.bodies[body].position, axis) -= h;
      const double force = -(potential(plus) - potential(minus)) / (2 * h);
      Vec3 a = acc[body];
      const double expected = component(a, axis) * ic.state.bodies[body].mass;
      EXPECT_NEAR(force, expected, 1e-6 * std::fabs(expected) + 1e17)
          << "body " << body << " axis " << axis;
    }
  }
}

// Extended-precision oracle: with a 64-bit mantissa the central difference
// at a millimetre resolves the gradient of a ~1e31 J potential.
TEST(Field, GradientAtMillimetreInExtendedPrecision) {
  static_assert(std::numeric_limits<long double>::digits >= 64);
  auto cfg = reference_config();
  cfg.damping_coefficient = 0.0;
  auto ic = build_initial_state(cfg);
  ic.state.bodies[0].position += Vec3{3e4, -2e4, 1e4};
  const auto acc = total_acceleration(
      ic.state, ic.springs, ForceLaw::gravity(cfg.constants.gravitational_constant));

  using P = std::array<long double, 3>;
  std::vector<P> base;
  for (const auto& b : ic.state.bodies) base.push_back({b.position.x, b.position.y, b.position.z});
  auto dist = [](const P& a, const P& b) {
    const long double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };
  auto potential = [&](const std::vector<P>& p) {
    long double u = 0.0L;
    const long double G = cfg.constants.gravitational_constant;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j)
        u -= G * ic.state.bodies[i].mass * ic.state.bodies[j].mass / dist(p[i], p[j]);
    for (const auto& sp : ic.springs) {
      const long double stretch = dist(p[sp.endpoint_a], p[sp.endpoint_b]) - sp.rest_length;
      u += 0.5L * sp.stiffness * stretch * stretch;
    }
    return u;
  };
  const long double h = 1e-3L;
  for (std::size_t body = 0; body < ic.state.bodies.size(); ++body) {
    const Vec3 f = acc[body] * ic.state.bodies[body].mass;
    for (int axis = 0; axis < 3; ++axis) {
      auto plus = base, minus = base;
      plus[body][axis] += h;
      minus[body][axis] -= h;
      const double fd = static_cast<double>(-(potential(plus) - potential(minus)) / (2 * h));
      Vec3 copy = f;
      EXPECT_NEAR(fd, component(copy, axis), 1e-6 * norm(f))
          << "body " << body << " axis " << axis;
    }
  }
}

TEST(Field, MomentumConservingSum) {
  const auto cfg = reference_config();
  auto ic = build_initial_state(cfg);
  ic.state.bodies[1].velocity += Vec3{5, 0, -3};
  ic.state.bodies[2].position += Vec3{1e3, 2e3, 0};
  const auto acc = total_acceleration(
      ic.state, ic.springs, ForceLaw::gravity(cfg.constants.gravitational_constant));
  Vec3 total;
  double scale = 0.0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    total += acc[i] * ic.state.bodies[i].mass;
    scale = std::max(scale, norm(acc[i] * ic.state.bodies[i].mass));
  }
  EXPECT_LT(norm(total), 1e-12 * scale);
}

TEST(Field, LongRangeToggle) {
  const auto cfg = reference_config();
  const auto ic = build_initial_state(cfg);
  std::vector<double> masses;
  for (const auto& b : ic.state.bodies) masses.push_back(b.mass);
  const AccelerationField field(masses, ic.springs, ForceLaw::gravity(6.667e-11), false);
  std::vector<double> pos, vel, acc(12);
  for (const auto& b : ic.state.bodies) {
    pos.insert(pos.end(), {b.position.x, b.position.y, b.position.z});
    vel.insert(vel.end(), {b.velocity.x, b.velocity.y, b.velocity.z});
  }
  field.evaluate(pos, vel, acc);
  for (double a : acc) EXPECT_EQ(a, 0.0);  // unstressed and no gravity
}

TEST(Field, CollapsedSpringThrows) {
  const Spring s{0, 1, 1.0, 1.0, 0.0};
  const AccelerationField field({1.0, 1.0}, {s}, ForceLaw::gravity(0.0), false);
  std::vector<double> pos(6, 0.0), vel(6, 0.0), acc(6);
  EXPECT_THROW(field.evaluate(pos, vel, acc), SingularityError);
  EXPECT_THROW(AccelerationField({1.0}, {s}, ForceLaw::gravity(0.0)),
               std::invalid_argument);
}
