#include "tidal/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tidal {

BodyState satellite_centroid(const SystemState& state) {
  // Weighted offsets from the first component: the components are close
  // together and far from the origin, so the offsets carry little rounding.
  BodyState c;
  const std::size_t n = state.satellite_count();
  for (std::size_t i = 0; i < n; ++i) c.mass += state.bodies[i].mass;
  const BodyState& ref = state.bodies[0];
  Vec3 dx, dv;
  for (std::size_t i = 1; i < n; ++i) {
    const auto& b = state.bodies[i];
    const double w = b.mass / c.mass;
    dx += (b.position - ref.position) * w;
    dv += (b.velocity - ref.velocity) * w;
  }
  c.position = ref.position + dx;
  c.velocity = ref.velocity + dv;
  return c;
}

RelativeState relative_state(const SystemState& state) {
  const BodyState c = satellite_centroid(state);
  const BodyState& planet = state.bodies[state.planet_index()];
  return {c.position - planet.position, c.velocity - planet.velocity};
}

double total_mass(const SystemState& state) {
  double total = 0.0;
  for (const auto& b : state.bodies) total += b.mass;
  return total;
}

OrbitalElements orbital_elements(const Vec3& r, const Vec3& v,
                                 double total_mass,
                                 const PhysicalConstants& constants) {
  const double mu = constants.gravitational_constant * total_mass;
  OrbitalElements el;
  el.distance = std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
  const double v2 = v.x * v.x + v.y * v.y + v.z * v.z;
  el.specific_energy = -mu / el.distance + 0.5 * v2;
  const double d1 = r.y * v.z - r.z * v.y;
  const double d2 = r.z * v.x - r.x * v.z;
  const double d3 = r.x * v.y - r.y * v.x;
  el.angular_momentum_sq = d1 * d1 + d2 * d2 + d3 * d3;
  el.bound = el.specific_energy < 0.0;
  if (el.bound) {
    el.semi_major_axis = -mu / (2.0 * el.specific_energy);
    el.eccentricity = std::sqrt(
        std::max(0.0, 1.0 - el.angular_momentum_sq / (mu * el.semi_major_axis)));
  } else {
    el.semi_major_axis = std::numeric_limits<double>::quiet_NaN();
    el.eccentricity = std::numeric_limits<double>::quiet_NaN();
  }
  return el;
}

AngularMomentumSplit spin_orbit_decomposition(const SystemState& state) {
  const BodyState c = satellite_centroid(state);
  const BodyState& planet = state.bodies[state.planet_index()];
  AngularMomentumSplit split;
  split.orbital =
      cross(c.position - planet.position, c.velocity - planet.velocity) *
      c.mass;
  for (std::size_t i = 0; i < state.satellite_count(); ++i) {
    const auto& b = state.bodies[i];
    split.spin +=
        cross(b.position - c.position, b.velocity - c.velocity) * b.mass;
  }
  // m x_c × v_c - m (x_c - x_p) × (v_c - v_p) expanded, plus the planet's own
  // angular momentum about the origin.
  const Vec3& xp = planet.position;
  const Vec3& vp = planet.velocity;
  split.frame = cross(xp, vp) * planet.mass +
                (cross(xp, c.velocity) + cross(c.position, vp) - cross(xp, vp)) *
                    c.mass;
  return split;
}

Vec3 total_angular_momentum(const SystemState& state) {
  Vec3 total;
  for (const auto& b : state.bodies) {
    total += cross(b.position, b.velocity) * b.mass;
  }
  return total;
}

double total_mechanical_energy(const SystemState& state,
                               std::span<const Spring> springs,
                               const PhysicalConstants& constants) {
  const auto& bodies = state.bodies;
  double kinetic = 0.0;
  for (const auto& b : bodies) kinetic += 0.5 * b.mass * norm_sq(b.velocity);
  double potential = 0.0;
  for (std::size_t i = 0; i + 1 < bodies.size(); ++i) {
    for (std::size_t j = i + 1; j < bodies.size(); ++j) {
      potential -= constants.gravitational_constant * bodies[i].mass *
                   bodies[j].mass /
                   norm(bodies[j].position - bodies[i].position);
    }
  }
  double elastic = 0.0;
  for (const auto& s : springs) {
    const double stretch =
        norm(bodies[s.endpoint_b].position - bodies[s.endpoint_a].position) -
        s.rest_length;
    elastic += 0.5 * s.stiffness * stretch * stretch;
  }
  return kinetic + potential + elastic;
}

OrbitalDiagnostics compute_diagnostics(const SystemState& state,
                                       std::span<const Spring> springs,
                                       const PhysicalConstants& constants) {
  const RelativeState rel = relative_state(state);
  const OrbitalElements el =
      orbital_elements(rel.position, rel.velocity, total_mass(state), constants);
  const AngularMomentumSplit split = spin_orbit_decomposition(state);

  OrbitalDiagnostics d;
  d.time = state.time;
  d.distance = el.distance;
  d.specific_energy = el.specific_energy;
  d.angular_momentum_sq = el.angular_momentum_sq;
  d.semi_major_axis = el.semi_major_axis;
  d.eccentricity = el.eccentricity;
  d.bound = el.bound;
  d.orbital_angular_momentum = split.orbital;
  d.spin_angular_momentum = split.spin;
  d.total_angular_momentum = total_angular_momentum(state);
  d.total_mechanical_energy = total_mechanical_energy(state, springs, constants);
  return d;
}

double orbital_period(double semi_major_axis, double mu) {
  return 2.0 * std::numbers::pi *
         std::sqrt(semi_major_axis * semi_major_axis * semi_major_axis / mu);
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

double median_absolute_deviation(std::span<const double> values) {
  const double center = median({values.begin(), values.end()});
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back(std::fabs(v - center));
  return median(std::move(dev));
}

std::vector<std::size_t> local_minima(std::span<const double> values) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] < values[i - 1] && values[i] < values[i + 1]) {
      out.push_back(i);
    }
  }
  return out;
}

SpikeDetection detect_spikes(std::span<const SeriesPoint> series,
                             const SpikeOptions& options) {
  SpikeDetection result;
  if (series.size() < 3 ||
      series.back().time - series.front().time < options.baseline_window) {
    result.series_too_short = true;
    return result;
  }

  std::vector<double> values;
  values.reserve(series.size());
  for (const auto& p : series) values.push_back(p.value);
  result.threshold =
      options.prominence_factor * median_absolute_deviation(values);

  // Running median over a centred window, via two moving indices.
  const double half = 0.5 * options.baseline_window;
  std::vector<double> baseline(series.size());
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    while (series[lo].time < series[i].time - half) ++lo;
    while (hi < series.size() && series[hi].time <= series[i].time + half) ++hi;
    baseline[i] = median({values.begin() + static_cast<std::ptrdiff_t>(lo),
                          values.begin() + static_cast<std::ptrdiff_t>(hi)});
  }

  std::size_t i = 0;
  while (i < series.size()) {
    if (!(values[i] - baseline[i] > result.threshold)) {
      ++i;
      continue;
    }
    std::size_t first = i, apex = i;
    while (i < series.size() && values[i] - baseline[i] > result.threshold) {
      if (values[i] > values[apex]) apex = i;
      ++i;
    }
    const std::size_t last = i - 1;
    // A run touching either end of the series has no interior maximum.
    if (apex == 0 || apex + 1 == series.size()) continue;
    const double before = series[first > 0 ? first - 1 : first].time;
    const double after = series[last + 1 < series.size() ? last + 1 : last].time;
    SpikeEvent ev;
    ev.time = series[apex].time;
    ev.peak_eccentricity = values[apex];
    ev.baseline_eccentricity = baseline[apex];
    ev.window_start = series[first].time;
    ev.window_end = series[last].time;
    ev.width = 0.5 * (after - before);
    result.events.push_back(ev);
  }
  return result;
}

std::vector<SeriesPoint> eccentricity_series(
    std::span<const OrbitalDiagnostics> diagnostics) {
  std::vector<SeriesPoint> out;
  out.reserve(diagnostics.size());
  for (const auto& d : diagnostics) out.push_back({d.time, d.eccentricity});
  return out;
}

std::optional<double> correlation(std::span<const double> a,
                                  std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) return std::nullopt;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

std::optional<double> spin_orbit_increment_correlation(
    std::span<const OrbitalDiagnostics> diagnostics, double start, double end) {
  std::vector<const OrbitalDiagnostics*> window;
  for (const auto& d : diagnostics) {
    if (d.time >= start && d.time <= end) window.push_back(&d);
  }
  if (window.size() < 3) return std::nullopt;
  const Vec3 axis_raw = window.front()->total_angular_momentum;
  const double axis_norm = norm(axis_raw);
  if (!(axis_norm > 0.0)) return std::nullopt;
  const Vec3 axis = axis_raw / axis_norm;

  std::vector<double> d_orbital, d_spin;
  for (std::size_t i = 1; i < window.size(); ++i) {
    d_orbital.push_back(dot(window[i]->orbital_angular_momentum -
                                window[i - 1]->orbital_angular_momentum,
                            axis));
    d_spin.push_back(dot(window[i]->spin_angular_momentum -
                             window[i - 1]->spin_angular_momentum,
                         axis));
  }
  return correlation(d_orbital, d_spin);
}

}  // namespace tidal
