#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tidal/diagnostics.hpp"
#include "tidal/integrator.hpp"
#include "tidal/model.hpp"

namespace tidal {

/// Order of the Runge-Kutta method. With local step-doubling control the
/// step scales as tol^(1/(p+1)) and the accumulated error as tol^(p/(p+1)).
inline constexpr double kMethodOrder = 4.0;

/// Accumulated-error scale of a run controlled at `tolerance`.
double error_scale(double tolerance);

class StudyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DriftEstimate {
  double per_orbit = 0.0;       // least-squares slope of per-orbit medians
  double standard_error = 0.0;  // of the slope
  std::size_t orbits = 0;       // number of complete orbits used
};

/// Secular trend of a series, in units of value per orbit. The series is cut
/// into consecutive windows of one orbital period starting at its first
/// sample; each window contributes its median (which ignores the narrow
/// periapsis spike) and a straight line is fitted through the medians.
/// Throws StudyError when fewer than three complete periods are covered.
DriftEstimate secular_drift(std::span<const SeriesPoint> series,
                            double orbital_period);

struct StudyOptions {
  /// Per-step perturbation at the base tolerance, metres. Each level scales
  /// it by its tolerance relative to the base, like a discretization error.
  double fault_injection = 0.0;
  bool long_range_forces = true;
  bool parallel = true;
  bool keep_states = false;
};

struct StudyLevel {
  double divisor = 1.0;
  double tolerance = 0.0;
  double fault_injection = 0.0;
  bool failed = false;
  std::string failure;
  Trajectory trajectory;
  DriftEstimate drift;
  /// Injected eccentricity change per orbit (the fault-injection ground truth).
  double injected_per_orbit = 0.0;
};

struct ConvergenceStudy {
  SimulationConfig base;
  double orbital_period = 0.0;
  std::vector<StudyLevel> levels;

  std::size_t successful_levels() const;
};

/// One independent run per tolerance divisor (tolerance = base / divisor).
/// Divisors must be at least two and strictly increasing. A level that
/// fails with StepUnderflow or SingularityError is flagged; the study throws
/// StudyError if fewer than two levels succeed.
ConvergenceStudy run_study(const SimulationConfig& config,
                           std::span<const double> divisors,
                           const StudyOptions& options = {});

enum class Verdict { Physical, NumericalArtifact, Mixed, Undetermined };

std::string_view to_string(Verdict verdict);
Verdict verdict_from_string(std::string_view text);

/// One tolerance level reduced to what the classifier needs.
struct LevelDrift {
  double tolerance = 0.0;
  double drift = 0.0;
  double standard_error = 0.0;
};

struct FeatureClassification {
  Verdict verdict = Verdict::Undetermined;
  double converged_drift = 0.0;  // extrapolated to zero tolerance, per orbit
  double converged_uncertainty = 0.0;
  double numerical_component = 0.0;  // loosest-level drift minus the limit
  double numerical_uncertainty = 0.0;
  std::vector<double> decay_per_decade;  // |d_loose| / |d_tight|, per decade
  std::string rationale;
  bool operator==(const FeatureClassification&) const = default;
};

inline constexpr double kArtifactDecayPerDecade = 4.0;
inline constexpr double kInvariantRatioLow = 0.5;
inline constexpr double kInvariantRatioHigh = 2.0;
inline constexpr double kSignificanceSigmas = 2.0;

/// Extrapolates drift against error_scale(tolerance) with a weighted linear
/// fit and classifies the trend:
///  - NumericalArtifact: limit within 2 sigma of zero and the drift shrinks
///    by at least 4x per tolerance decade;
///  - Physical: drift ratio between adjacent levels within [0.5, 2] per
///    decade and a nonzero limit;
///  - Mixed: nonzero limit plus a significant tolerance-dependent part;
///  - Undetermined otherwise.
FeatureClassification classify_drifts(std::span<const LevelDrift> levels);

FeatureClassification classify_trend(const ConvergenceStudy& study);

/// A study without its trajectories: what the drift report records.
struct LevelSummary {
  double divisor = 1.0;
  double tolerance = 0.0;
  double fault_injection = 0.0;
  bool failed = false;
  std::string failure;
  double drift = 0.0;
  double standard_error = 0.0;
  std::size_t orbits = 0;
  double injected_per_orbit = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  bool operator==(const LevelSummary&) const = default;
};

struct StudySummary {
  double base_tolerance = 0.0;
  double orbital_period = 0.0;
  std::vector<LevelSummary> levels;
  FeatureClassification classification;
  bool operator==(const StudySummary&) const = default;
};

StudySummary summarize(const ConvergenceStudy& study);

/// JSON drift/classification report and its inverse.
std::string format_study_report(const StudySummary& summary);
StudySummary parse_study_report(std::string_view text);

}  // namespace tidal
