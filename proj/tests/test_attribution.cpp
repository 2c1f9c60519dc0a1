#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tidal/attribution.hpp"

using namespace tidal;

namespace {

std::vector<SeriesPoint> linear_series(double slope_per_orbit, double period,
                                       double orbits, double dt) {
  std::vector<SeriesPoint> out;
  for (double t = 0.0; t <= orbits * period + 1e-9; t += dt) {
    out.push_back({t, 0.6 + slope_per_orbit * t / period});
  }
  return out;
}

std::vector<LevelDrift> levels_from(const std::vector<double>& tolerances,
                                    double physical, double numerical,
                                    double se) {
  std::vector<LevelDrift> out;
  for (double tol : tolerances) {
    out.push_back({tol, physical + numerical * error_scale(tol), se});
  }
  return out;
}

}  // namespace

TEST(ErrorScale, FollowsMethodOrder) {
  EXPECT_DOUBLE_EQ(error_scale(10.0), std::pow(10.0, 0.8));
  EXPECT_DOUBLE_EQ(error_scale(1.0), 1.0);
}

TEST(SecularDrift, RecoversLinearTrend) {
  const auto est = secular_drift(linear_series(-2e-4, 100.0, 10, 1.0), 100.0);
  EXPECT_NEAR(est.per_orbit, -2e-4, 1e-12);
  EXPECT_EQ(est.orbits, 10u);
  EXPECT_LT(est.standard_error, 1e-12);
}

TEST(SecularDrift, IgnoresNarrowPeriodicSpikes) {
  auto series = linear_series(1e-5, 100.0, 8, 1.0);
  for (auto& p : series) {
    if (std::fmod(p.time, 100.0) < 3.0) p.value += 0.05;
  }
  EXPECT_NEAR(secular_drift(series, 100.0).per_orbit, 1e-5, 1e-9);
}

TEST(SecularDrift, InvariantUnderTimeRescaling) {
  const auto a = secular_drift(linear_series(3e-6, 100.0, 6, 2.0), 100.0);
  auto scaled = linear_series(3e-6, 100.0, 6, 2.0);
  for (auto& p : scaled) p.time *= 60.0;
  const auto b = secular_drift(scaled, 6000.0);
  EXPECT_NEAR(a.per_orbit, b.per_orbit, 1e-15);
}

TEST(SecularDrift, TooShortThrows) {
  EXPECT_THROW(secular_drift(linear_series(0.0, 100.0, 2.5, 1.0), 100.0), StudyError);
  EXPECT_THROW(secular_drift({}, 100.0), StudyError);
  EXPECT_THROW(secular_drift(linear_series(0.0, 100.0, 5, 1.0), 0.0), StudyError);
}

TEST(Classifier, VanishingDriftIsArtifact) {
  const auto fc = classify_drifts(levels_from({100, 10, 1}, 0.0, 1e-6, 1e-10));
  EXPECT_EQ(fc.verdict, Verdict::NumericalArtifact) << fc.rationale;
  EXPECT_NEAR(fc.converged_drift, 0.0, 1e-9);
  EXPECT_NEAR(fc.numerical_component, 1e-6 * error_scale(100), 1e-9);
}

TEST(Classifier, InvariantDriftIsPhysical) {
  const auto fc = classify_drifts(levels_from({100, 10, 1}, -7e-6, 0.0, 1e-8));
  EXPECT_EQ(fc.verdict, Verdict::Physical) << fc.rationale;
  EXPECT_NEAR(fc.converged_drift, -7e-6, 1e-12);
}

TEST(Classifier, BothComponentsIsMixed) {
  const auto fc = classify_drifts(levels_from({100, 10, 1}, -5e-6, -2e-7, 1e-9));
  EXPECT_EQ(fc.verdict, Verdict::Mixed) << fc.rationale;
  EXPECT_NEAR(fc.converged_drift, -5e-6, 1e-9);
}

TEST(Classifier, NoiseIsUndetermined) {
  const std::vector<LevelDrift> noisy{{100, 1e-8, 1e-6}, {10, -2e-8, 1e-6}, {1, 3e-9, 1e-6}};
  EXPECT_EQ(classify_drifts(noisy).verdict, Verdict::Undetermined);
}

TEST(Classifier, DegenerateInputsAreUndetermined) {
  EXPECT_EQ(classify_drifts(std::vector<LevelDrift>{{1, 1e-6, 1e-9}}).verdict,
            Verdict::Undetermined);
  const std::vector<LevelDrift> same{{1, 1e-6, 1e-9}, {1, 1e-6, 1e-9}};
  EXPECT_EQ(classify_drifts(same).verdict, Verdict::Undetermined);
}

TEST(Classifier, InputOrderDoesNotMatter) {
  auto levels = levels_from({1000, 100, 10, 1}, 0.0, 3e-7, 1e-10);
  const auto a = classify_drifts(levels);
  std::reverse(levels.begin(), levels.end());
  const auto b = classify_drifts(levels);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_DOUBLE_EQ(a.converged_drift, b.converged_drift);
}

// A 2-sigma test flags a few percent of pure-noise limits as nonzero, so the
// property is a rate, not a guarantee.
TEST(Classifier, ArtifactAcrossRandomAmplitudes) {
  std::mt19937_64 rng(13);
  int artifacts = 0;
  std::uniform_real_distribution<double> log_amp(-12.0, -3.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double amp = std::pow(10.0, log_amp(rng)) * (i % 2 ? 1 : -1);
    auto levels = levels_from({100, 10, 1}, 0.0, amp, std::fabs(amp) * 1e-3);
    for (auto& l : levels) l.drift += noise(rng) * l.standard_error;
    const auto verdict = classify_drifts(levels).verdict;
    if (verdict == Verdict::NumericalArtifact) ++artifacts;
    EXPECT_NE(verdict, Verdict::Physical) << "amplitude " << amp;
  }
  EXPECT_GE(artifacts, 180);
}

TEST(Verdict, StringRoundTrip) {
  for (Verdict v : {Verdict::Physical, Verdict::NumericalArtifact, Verdict::Mixed,
                    Verdict::Undetermined}) {
    EXPECT_EQ(verdict_from_string(to_string(v)), v);
  }
  EXPECT_THROW(verdict_from_string("Maybe"), std::invalid_argument);
}

TEST(Study, RejectsBadDivisors) {
  const auto cfg = reference_config();
  const std::vector<double> one{1}, flat{1, 1}, down{10, 1}, negative{-1, 1};
  EXPECT_THROW(run_study(cfg, one), std::invalid_argument);
  EXPECT_THROW(run_study(cfg, flat), std::invalid_argument);
  EXPECT_THROW(run_study(cfg, down), std::invalid_argument);
  EXPECT_THROW(run_study(cfg, negative), std::invalid_argument);
}

TEST(Study, FailedLevelIsFlagged) {
  auto cfg = reference_config();
  cfg.number_of_bodies = 2;
  const std::vector<double> divisors{1, 10, 1e40};
  StudyOptions opt;
  opt.parallel = false;
  const auto study = run_study(cfg, divisors, opt);
  ASSERT_EQ(study.levels.size(), 3u);
  EXPECT_FALSE(study.levels[0].failed);
  EXPECT_FALSE(study.levels[1].failed);
  EXPECT_TRUE(study.levels[2].failed);
  EXPECT_FALSE(study.levels[2].failure.empty());
  EXPECT_EQ(study.successful_levels(), 2u);

  const std::vector<double> mostly_bad{1e40, 1e41};
  EXPECT_THROW(run_study(cfg, mostly_bad, opt), StudyError);
}

TEST(Study, ParallelMatchesSequential) {
  auto cfg = reference_config();
  cfg.number_of_bodies = 2;
  const std::vector<double> divisors{1, 10};
  StudyOptions seq;
  seq.parallel = false;
  const auto a = summarize(run_study(cfg, divisors, seq));
  const auto b = summarize(run_study(cfg, divisors));
  EXPECT_EQ(a, b);
}

TEST(Study, ReportRoundTrips) {
  StudySummary s;
  s.base_tolerance = 100;
  s.orbital_period = 8501.9;
  s.levels.push_back({1, 100, 0, false, "", -1.5e-9, 2e-11, 14, 0, 300, 20});
  s.levels.push_back({1e40, 1e-38, 0, true, "step underflow", 0, 0, 0, 0, 0, 0});
  s.classification.verdict = Verdict::Mixed;
  s.classification.converged_drift = 1.0 / 3.0;
  s.classification.decay_per_decade = {4.5, std::numeric_limits<double>::infinity()};
  s.classification.rationale = "because";
  EXPECT_EQ(parse_study_report(format_study_report(s)), s);
  EXPECT_THROW(parse_study_report("{}"), StudyError);
}
