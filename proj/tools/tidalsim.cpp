// tidalsim: command-line front end for the tidal-satellite simulator.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "tidal/attribution.hpp"
#include "tidal/config_io.hpp"
#include "tidal/explain.hpp"
#include "tidal/forces.hpp"
#include "tidal/integrator.hpp"
#include "tidal/trajectory_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUsage = 64;

struct UsageError {
  std::string message;
};

// Thrown for configs that parse but violate a constraint.
struct InvalidConfig {
  tidal::ValidationResult result;
};

tidal::SimulationConfig load_checked(const std::string& path) {
  tidal::SimulationConfig config = tidal::load_config(path);
  auto result = tidal::validate_config(config);
  if (!result.ok()) throw InvalidConfig{std::move(result)};
  return config;
}

std::string metadata(const tidal::SimulationConfig& config,
                     const tidal::Trajectory& traj, double fault_injection) {
  std::ostringstream out;
  out << "# Resolved configuration; this file loads as a config.\n"
      << tidal::format_config(config)
      << "# fault_injection_m = " << tidal::format_double(fault_injection) << '\n'
      << "# accepted_steps = " << traj.accepted_steps() << '\n'
      << "# rejected_steps = " << traj.rejected_steps() << '\n'
      << "# samples = " << traj.diagnostics.size() << '\n'
      << "# bodies 1.." << config.number_of_bodies - 1
      << " are satellite components, body " << config.number_of_bodies
      << " is the planet\n"
      << "# bodies.csv coordinates are relative to body "
      << config.body_chosen_as_origin << '\n'
      << "# L_orbital and L_spin are components along the initial total "
         "angular momentum\n";
  return out.str();
}

std::string divisor_label(double d) {
  std::string s = tidal::format_double(d);
  for (char& c : s) {
    if (c == '.' || c == '+') c = '_';
  }
  return s;
}

int cmd_validate(const std::string& config_path) {
  const tidal::SimulationConfig config = tidal::load_config(config_path);
  const auto result = tidal::validate_config(config);
  for (const auto& v : result.violations) {
    std::cout << v.field << ": " << v.message << '\n';
  }
  if (!result.ok()) return kExitValidation;
  std::cout << "ok\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const fs::path& out_dir,
                 double fault_injection) {
  const auto config = load_checked(config_path);
  tidal::RunOptions options;
  options.fault_injection = fault_injection;
  const tidal::Trajectory traj = tidal::run(config, options);
  fs::create_directories(out_dir);
  tidal::write_trajectory_csv(out_dir / "trajectory.csv", traj.diagnostics);
  tidal::write_file_atomic(
      out_dir / "bodies.csv",
      tidal::format_bodies_csv(traj.states, config.body_chosen_as_origin));
  tidal::write_file_atomic(out_dir / "run.meta",
                           metadata(config, traj, fault_injection));
  std::cout << "samples " << traj.diagnostics.size() << ", accepted steps "
            << traj.accepted_steps() << ", rejected " << traj.rejected_steps()
            << '\n';
  return 0;
}

int cmd_study(const std::string& config_path, const fs::path& out_dir,
              const std::vector<double>& divisors, double fault_injection,
              bool sequential) {
  if (divisors.size() < 2) throw UsageError{"--divisors needs at least two values"};
  for (std::size_t i = 0; i < divisors.size(); ++i) {
    if (!(divisors[i] > 0.0) || (i > 0 && !(divisors[i] > divisors[i - 1]))) {
      throw UsageError{"--divisors must be positive and strictly increasing"};
    }
  }
  const auto config = load_checked(config_path);
  tidal::StudyOptions options;
  options.fault_injection = fault_injection;
  options.parallel = !sequential;
  const auto study = tidal::run_study(config, divisors, options);
  fs::create_directories(out_dir);
  for (const auto& level : study.levels) {
    if (level.failed) continue;
    tidal::write_trajectory_csv(
        out_dir / ("level_" + divisor_label(level.divisor) + ".csv"),
        level.trajectory.diagnostics);
  }
  const auto summary = tidal::summarize(study);
  tidal::write_file_atomic(out_dir / "study.json",
                           tidal::format_study_report(summary));
  for (const auto& l : summary.levels) {
    std::cout << "tolerance " << l.tolerance << " m: ";
    if (l.failed) {
      std::cout << "failed (" << l.failure << ")\n";
    } else {
      std::cout << "drift " << l.drift << " +/- " << l.standard_error
                << " per orbit\n";
    }
  }
  std::cout << "verdict " << tidal::to_string(summary.classification.verdict)
            << " (" << summary.classification.rationale << ")\n";
  return 0;
}

struct ExplainArgs {
  std::string config;
  std::string trajectory;
  std::string study;
  std::string pattern;
  std::string format = "text";
  std::string out;
  double fault_injection = 0.0;
};

int cmd_explain(const ExplainArgs& a) {
  const auto config = load_checked(a.config);
  const auto pattern =
      a.pattern.empty()
          ? tidal::explain::satellite_pattern(config, a.fault_injection)
          : tidal::explain::parse_pattern(tidal::read_file(a.pattern));

  tidal::explain::DeriveOptions options;
  options.output_interval = config.output_interval;
  options.sources.push_back("config: " + a.config);
  std::vector<tidal::OrbitalDiagnostics> diagnostics;
  if (a.trajectory.empty()) {
    tidal::RunOptions run_options;
    run_options.fault_injection = a.fault_injection;
    run_options.keep_states = false;
    diagnostics = tidal::run(config, run_options).diagnostics;
    options.sources.push_back("trajectory: computed in process");
  } else {
    diagnostics = tidal::read_trajectory_csv(a.trajectory);
    options.sources.push_back("trajectory: " + a.trajectory);
  }
  std::optional<tidal::StudySummary> study;
  if (!a.study.empty()) {
    study = tidal::parse_study_report(tidal::read_file(a.study));
    options.sources.push_back("study: " + a.study);
  }

  const auto report = tidal::explain::derive(
      pattern, diagnostics, study ? &*study : nullptr, options);
  const auto document = tidal::explain::render_report(
      report, a.format == "json" ? tidal::explain::Format::structured
                                 : tidal::explain::Format::plain_text);
  if (a.out.empty()) {
    std::cout << document;
  } else {
    tidal::write_file_atomic(a.out, document);
  }
  return 0;
}

int cmd_plot(const std::string& trajectory, const fs::path& out_dir) {
  const auto diagnostics = tidal::read_trajectory_csv(trajectory);
  tidal::emit_plot_data(diagnostics, out_dir);
  std::cout << "wrote " << (out_dir / "eccentricity.dat").string() << " and "
            << (out_dir / "eccentricity.gp").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tidal-satellite simulator with numerical-artifact attribution"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  double fault_injection = 0.0;

  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  auto* simulate = app.add_subcommand("simulate", "Run one simulation");
  simulate->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("-o,--out", out_dir, "Output directory")->required();
  simulate->add_flag("--fault-injection{1e-7}", fault_injection,
                     "Per-step positional perturbation, m (bare flag: 1e-7)");

  std::vector<double> divisors{1.0, 10.0};
  bool sequential = false;
  auto* study = app.add_subcommand("study", "Tolerance convergence study");
  study->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  study->add_option("-o,--out", out_dir, "Output directory")->required();
  study->add_option("-d,--divisors", divisors, "Tolerance divisors, increasing")
      ->delimiter(',');
  study->add_flag("--fault-injection{1e-7}", fault_injection,
                  "Per-step positional perturbation at the base tolerance, m "
                  "(bare flag: 1e-7)");
  study->add_flag("--sequential", sequential, "Run levels one after another");

  ExplainArgs explain_args;
  auto* explain = app.add_subcommand("explain", "Render an explanation report");
  explain->add_option("config", explain_args.config, "Config file")->required()->check(CLI::ExistingFile);
  explain->add_option("-t,--trajectory", explain_args.trajectory,
                      "Trajectory CSV; simulated when omitted")
      ->check(CLI::ExistingFile);
  explain->add_option("-s,--study", explain_args.study, "Study report (study.json)")
      ->check(CLI::ExistingFile);
  explain->add_option("-p,--pattern", explain_args.pattern,
                      "Pattern file; the built-in satellite pattern when omitted")
      ->check(CLI::ExistingFile);
  explain->add_option("-f,--format", explain_args.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  explain->add_option("-o,--out", explain_args.out, "Write the report here");
  explain->add_flag("--fault-injection{1e-7}", explain_args.fault_injection,
                    "Per-step positional perturbation, m (bare flag: 1e-7)");

  std::string plot_input;
  auto* plot = app.add_subcommand("plot", "Emit eccentricity plot data");
  plot->add_option("trajectory", plot_input, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(config_path);
    if (*simulate) return cmd_simulate(config_path, out_dir, fault_injection);
    if (*study) {
      return cmd_study(config_path, out_dir, divisors, fault_injection, sequential);
    }
    if (*explain) return cmd_explain(explain_args);
    if (*plot) return cmd_plot(plot_input, out_dir);
  } catch (const InvalidConfig& e) {
    for (const auto& v : e.result.violations) {
      std::cerr << v.field << ": " << v.message << '\n';
    }
    return kExitValidation;
  } catch (const tidal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const tidal::StepUnderflow& e) {
    std::cerr << "step underflow: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const tidal::SingularityError& e) {
    std::cerr << "singularity: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.message << '\n' << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
