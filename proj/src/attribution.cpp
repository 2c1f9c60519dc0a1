#include "tidal/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tidal {

double error_scale(double tolerance) {
  return std::pow(tolerance, kMethodOrder / (kMethodOrder + 1.0));
}

DriftEstimate secular_drift(std::span<const SeriesPoint> series,
                            double orbital_period) {
  if (!(orbital_period > 0.0)) {
    throw StudyError("orbital period must be positive");
  }
  if (series.empty()) throw StudyError("empty series");
  const double t0 = series.front().time;
  const double span = series.back().time - t0;
  // Relative slack so that a series ending exactly on a period boundary
  // counts that period as complete.
  const auto orbits = static_cast<std::size_t>(
      std::floor(span / orbital_period * (1.0 + 1e-12)));
  if (orbits < 3) {
    throw StudyError("series spans fewer than three orbital periods");
  }

  std::vector<std::vector<double>> bins(orbits);
  for (const auto& p : series) {
    const double phase = (p.time - t0) / orbital_period;
    const auto k = static_cast<std::size_t>(std::floor(phase));
    if (k < orbits && std::isfinite(p.value)) bins[k].push_back(p.value);
  }

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < orbits; ++k) {
    if (bins[k].empty()) continue;
    xs.push_back(static_cast<double>(k));
    ys.push_back(median(std::move(bins[k])));
  }
  if (xs.size() < 3) {
    throw StudyError("fewer than three orbital periods contain samples");
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  DriftEstimate est;
  est.per_orbit = sxy / sxx;
  est.orbits = xs.size();
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + est.per_orbit * (xs[i] - mx));
    rss += r * r;
  }
  est.standard_error = std::sqrt(rss / (n - 2.0) / sxx);
  return est;
}

std::size_t ConvergenceStudy::successful_levels() const {
  return static_cast<std::size_t>(std::count_if(
      levels.begin(), levels.end(),
      [](const StudyLevel& l) { return !l.failed; }));
}

ConvergenceStudy run_study(const SimulationConfig& config,
                           std::span<const double> divisors,
                           const StudyOptions& options) {
  if (divisors.size() < 2) {
    throw std::invalid_argument("a convergence study needs at least two levels");
  }
  for (std::size_t i = 0; i < divisors.size(); ++i) {
    if (!(divisors[i] > 0.0) || (i > 0 && !(divisors[i] > divisors[i - 1]))) {
      throw std::invalid_argument(
          "tolerance divisors must be positive and strictly increasing");
    }
  }

  ConvergenceStudy study;
  study.base = config;
  {
    const InitialConditions ic = build_initial_state(config);
    const auto d0 = compute_diagnostics(ic.state, ic.springs, config.constants);
    study.orbital_period = orbital_period(
        d0.semi_major_axis,
        config.constants.gravitational_constant * total_mass(ic.state));
  }

  auto run_level = [&config, &options,
                    period = study.orbital_period](double divisor) {
    StudyLevel level;
    level.divisor = divisor;
    level.tolerance = config.tolerance / divisor;
    level.fault_injection = options.fault_injection / divisor;
    SimulationConfig cfg = config;
    cfg.tolerance = level.tolerance;
    RunOptions run_options;
    run_options.fault_injection = level.fault_injection;
    run_options.long_range_forces = options.long_range_forces;
    run_options.keep_states = options.keep_states;
    try {
      level.trajectory = run(cfg, run_options);
    } catch (const StepUnderflow& e) {
      level.failed = true;
      level.failure = e.what();
      return level;
    } catch (const SingularityError& e) {
      level.failed = true;
      level.failure = e.what();
      return level;
    }
    try {
      level.drift =
          secular_drift(eccentricity_series(level.trajectory.diagnostics), period);
      level.injected_per_orbit = level.trajectory.injected_eccentricity_change *
                                 period / config.total_simulation_time;
    } catch (const StudyError& e) {
      level.failed = true;
      level.failure = e.what();
    }
    return level;
  };

  if (options.parallel) {
    std::vector<std::future<StudyLevel>> pending;
    for (double d : divisors) {
      pending.push_back(std::async(std::launch::async, run_level, d));
    }
    for (auto& f : pending) study.levels.push_back(f.get());
  } else {
    for (double d : divisors) study.levels.push_back(run_level(d));
  }

  if (study.successful_levels() < 2) {
    std::string msg = "fewer than two tolerance levels completed";
    for (const auto& l : study.levels) {
      if (l.failed) msg += "; tolerance " + std::to_string(l.tolerance) + ": " + l.failure;
    }
    throw StudyError(msg);
  }
  return study;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Physical:
      return "Physical";
    case Verdict::NumericalArtifact:
      return "NumericalArtifact";
    case Verdict::Mixed:
      return "Mixed";
    case Verdict::Undetermined:
      return "Undetermined";
  }
  return "Undetermined";
}

Verdict verdict_from_string(std::string_view text) {
  for (Verdict v : {Verdict::Physical, Verdict::NumericalArtifact,
                    Verdict::Mixed, Verdict::Undetermined}) {
    if (to_string(v) == text) return v;
  }
  throw std::invalid_argument("unknown verdict: " + std::string(text));
}

FeatureClassification classify_drifts(std::span<const LevelDrift> input) {
  FeatureClassification out;
  std::vector<LevelDrift> levels(input.begin(), input.end());
  std::sort(levels.begin(), levels.end(),
            [](const LevelDrift& a, const LevelDrift& b) {
              return a.tolerance > b.tolerance;
            });
  if (levels.size() < 2) {
    out.rationale = "fewer than two tolerance levels";
    return out;
  }
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i].tolerance < levels[i - 1].tolerance)) {
      out.rationale = "tolerance levels are not distinct";
      return out;
    }
  }

  // Zero-tolerance limit from a weighted straight-line fit of drift against
  // error_scale(tolerance). With two levels the line is exact and the size of
  // the extrapolation is added to the uncertainty; with more, the
  // uncertainty is inflated by the scatter of the levels about the line.
  double scale = 0.0;
  for (const auto& l : levels) scale = std::max(scale, std::fabs(l.drift));
  const double floor_se = std::max(1e-9 * scale, 1e-150);
  std::vector<double> se(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    se[i] = std::max(levels[i].standard_error, floor_se);
  }
  // Weights relative to the most precise level keep the sums in range.
  const double se_min = *std::min_element(se.begin(), se.end());
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  std::vector<double> weights;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double w = (se_min / se[i]) * (se_min / se[i]);
    const double x = error_scale(levels[i].tolerance);
    weights.push_back(w);
    sw += w;
    swx += w * x;
    swy += w * levels[i].drift;
    swxx += w * x * x;
    swxy += w * x * levels[i].drift;
  }
  const double det = sw * swxx - swx * swx;
  const double slope = (sw * swxy - swx * swy) / det;
  out.converged_drift = (swy - slope * swx) / sw;
  const double stat = se_min * std::sqrt(swxx / det);
  if (levels.size() == 2) {
    out.converged_uncertainty =
        std::hypot(stat, levels.back().drift - out.converged_drift);
  } else {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double r = levels[i].drift - out.converged_drift -
                       slope * error_scale(levels[i].tolerance);
      chi2 += weights[i] * r * r / (se_min * se_min);
    }
    const double dof = static_cast<double>(levels.size()) - 2.0;
    out.converged_uncertainty = stat * std::max(1.0, std::sqrt(chi2 / dof));
  }

  const LevelDrift& loose = levels.front();
  out.numerical_component = loose.drift - out.converged_drift;
  out.numerical_uncertainty =
      std::hypot(loose.standard_error, out.converged_uncertainty);

  const double k = kSignificanceSigmas;
  bool invariant = true;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const auto& a = levels[i - 1];
    const auto& b = levels[i];
    const double decades = std::log10(a.tolerance / b.tolerance);
    const double magnitude_ratio =
        std::fabs(b.drift) > 0.0 ? std::fabs(a.drift) / std::fabs(b.drift)
                                 : std::numeric_limits<double>::infinity();
    const double per_decade = std::pow(magnitude_ratio, 1.0 / decades);
    out.decay_per_decade.push_back(per_decade);
    const double signed_ratio = b.drift != 0.0 ? a.drift / b.drift : 0.0;
    const double signed_per_decade =
        signed_ratio > 0.0 ? std::pow(signed_ratio, 1.0 / decades) : 0.0;
    if (!(signed_per_decade >= kInvariantRatioLow &&
          signed_per_decade <= kInvariantRatioHigh)) {
      invariant = false;
    }
  }

  // Decay is judged end to end, so a single noisy intermediate level does
  // not mask an overall trend.
  const auto& tight = levels.back();
  const double span_decades = std::log10(loose.tolerance / tight.tolerance);
  const bool decays =
      std::fabs(tight.drift) <= k * tight.standard_error ||
      std::pow(std::fabs(loose.drift) / std::fabs(tight.drift),
               1.0 / span_decades) >= kArtifactDecayPerDecade;

  const bool limit_is_zero =
      std::fabs(out.converged_drift) <= k * out.converged_uncertainty;
  const bool loose_significant =
      std::fabs(loose.drift) > k * loose.standard_error;
  const bool numerical_significant =
      std::fabs(out.numerical_component) > k * out.numerical_uncertainty;

  std::ostringstream why;
  why.precision(3);
  why << "limit " << out.converged_drift << " +/- " << out.converged_uncertainty
      << " per orbit; ";
  if (limit_is_zero && decays && loose_significant) {
    out.verdict = Verdict::NumericalArtifact;
    why << "drift vanishes with tolerance";
  } else if (invariant && !limit_is_zero) {
    out.verdict = Verdict::Physical;
    why << "drift is tolerance-invariant";
  } else if (!limit_is_zero && numerical_significant) {
    out.verdict = Verdict::Mixed;
    why << "nonzero limit plus tolerance-dependent part "
        << out.numerical_component;
  } else {
    out.verdict = Verdict::Undetermined;
    why << "no criterion met";
  }
  out.rationale = why.str();
  return out;
}

FeatureClassification classify_trend(const ConvergenceStudy& study) {
  std::vector<LevelDrift> drifts;
  for (const auto& level : study.levels) {
    if (level.failed) continue;
    drifts.push_back({level.tolerance, level.drift.per_orbit,
                      level.drift.standard_error});
  }
  return classify_drifts(drifts);
}

StudySummary summarize(const ConvergenceStudy& study) {
  StudySummary out;
  out.base_tolerance = study.base.tolerance;
  out.orbital_period = study.orbital_period;
  for (const auto& l : study.levels) {
    LevelSummary s;
    s.divisor = l.divisor;
    s.tolerance = l.tolerance;
    s.fault_injection = l.fault_injection;
    s.failed = l.failed;
    s.failure = l.failure;
    s.drift = l.drift.per_orbit;
    s.standard_error = l.drift.standard_error;
    s.orbits = l.drift.orbits;
    s.injected_per_orbit = l.injected_per_orbit;
    s.accepted_steps = l.trajectory.accepted_steps();
    s.rejected_steps = l.trajectory.rejected_steps();
    out.levels.push_back(s);
  }
  out.classification = classify_trend(study);
  return out;
}

std::string format_study_report(const StudySummary& summary) {
  using nlohmann::json;
  json levels = json::array();
  for (const auto& l : summary.levels) {
    levels.push_back({{"divisor", l.divisor},
                      {"tolerance", l.tolerance},
                      {"fault_injection", l.fault_injection},
                      {"failed", l.failed},
                      {"failure", l.failure},
                      {"drift_per_orbit", l.drift},
                      {"standard_error", l.standard_error},
                      {"orbits", l.orbits},
                      {"injected_per_orbit", l.injected_per_orbit},
                      {"accepted_steps", l.accepted_steps},
                      {"rejected_steps", l.rejected_steps}});
  }
  const auto& c = summary.classification;
  // A tight level with exactly zero drift gives an infinite ratio.
  json decay = json::array();
  for (double d : c.decay_per_decade) {
    decay.push_back(std::isfinite(d) ? json(d) : json(nullptr));
  }
  json doc = {
      {"base_tolerance", summary.base_tolerance},
      {"orbital_period", summary.orbital_period},
      {"levels", levels},
      {"classification",
       {{"verdict", std::string(to_string(c.verdict))},
        {"converged_drift", c.converged_drift},
        {"converged_uncertainty", c.converged_uncertainty},
        {"numerical_component", c.numerical_component},
        {"numerical_uncertainty", c.numerical_uncertainty},
        {"decay_per_decade", decay},
        {"rationale", c.rationale}}}};
  return doc.dump(2) + "\n";
}

StudySummary parse_study_report(std::string_view text) {
  using nlohmann::json;
  StudySummary out;
  try {
    const json doc = json::parse(text);
    out.base_tolerance = doc.at("base_tolerance").get<double>();
    out.orbital_period = doc.at("orbital_period").get<double>();
    for (const auto& l : doc.at("levels")) {
      LevelSummary s;
      s.divisor = l.at("divisor").get<double>();
      s.tolerance = l.at("tolerance").get<double>();
      s.fault_injection = l.at("fault_injection").get<double>();
      s.failed = l.at("failed").get<bool>();
      s.failure = l.at("failure").get<std::string>();
      s.drift = l.at("drift_per_orbit").get<double>();
      s.standard_error = l.at("standard_error").get<double>();
      s.orbits = l.at("orbits").get<std::size_t>();
      s.injected_per_orbit = l.at("injected_per_orbit").get<double>();
      s.accepted_steps = l.at("accepted_steps").get<std::size_t>();
      s.rejected_steps = l.at("rejected_steps").get<std::size_t>();
      out.levels.push_back(s);
    }
    const auto& c = doc.at("classification");
    auto& fc = out.classification;
    fc.verdict = verdict_from_string(c.at("verdict").get<std::string>());
    fc.converged_drift = c.at("converged_drift").get<double>();
    fc.converged_uncertainty = c.at("converged_uncertainty").get<double>();
    fc.numerical_component = c.at("numerical_component").get<double>();
    fc.numerical_uncertainty = c.at("numerical_uncertainty").get<double>();
    for (const auto& d : c.at("decay_per_decade")) {
      fc.decay_per_decade.push_back(d.is_null()
                                        ? std::numeric_limits<double>::infinity()
                                        : d.get<double>());
    }
    fc.rationale = c.at("rationale").get<std::string>();
  } catch (const json::exception& e) {
    throw StudyError(std::string("malformed study report: ") + e.what());
  }
  return out;
}

}  // namespace tidal
