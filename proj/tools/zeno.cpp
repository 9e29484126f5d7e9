// zeno: simulate, analyze, theory, calibrate.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zeno/commands.hpp"
#include "zeno/config.hpp"

namespace fs = std::filesystem;

namespace {

struct RunFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> series;
  std::optional<std::string> variant;
  std::optional<unsigned> n;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config_path, "experiment config (key=value) or manifest.json to replay")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--series", f.series, "number of fractionated series");
  app->add_option("--variant", f.variant, "fractionated variant")->check(CLI::IsMember({"a", "b", "c"}));
  app->add_option("--n", f.n, "fractionation n")->check(CLI::Range(1u, 1000u));
}

zeno::ExperimentConfig load(const RunFlags& f) {
  zeno::ConfigOverrides overrides;
  if (f.seed) overrides["seed"] = std::to_string(*f.seed);
  if (f.series) overrides["series"] = std::to_string(*f.series);
  if (f.variant) overrides["variant"] = *f.variant;
  if (f.n) {
    overrides["n"] = std::to_string(*f.n);
  }
  return zeno::parse_config(zeno::load_config_text(f.config_path), overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Zeno experiment simulator and analyzer"};
  app.set_version_flag("--version", std::string(zeno::kToolVersion));
  app.require_subcommand(1);

  RunFlags sim_flags;
  std::string sim_out = "out";
  auto* simulate = app.add_subcommand("simulate", "run a configured protocol and write data plus manifest.json");
  add_run_flags(simulate, sim_flags);
  simulate->add_option("--out", sim_out, "output directory");

  std::vector<std::string> inputs;
  std::string analyze_out = "analysis";
  bool use_truth = false;
  std::string selection = "off";
  std::optional<double> prep_error;
  std::optional<double> false_on;
  auto* analyze = app.add_subcommand("analyze", "run-length, theta-fit and survival tables from data files");
  analyze->add_option("inputs", inputs, "trajectory or series files")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", analyze_out, "output directory");
  analyze->add_flag("--use-truth", use_truth, "analyze simulation-truth bits (diagnostic)");
  analyze->add_option("--runs", selection, "runs entering the theta fit")
      ->check(CLI::IsMember({"off", "on", "pooled"}));
  analyze->add_option("--prep-error", prep_error, "preparation error used for correction");
  analyze->add_option("--false-on", false_on, "false-on probability used for correction");

  unsigned n_max = 9;
  std::optional<std::string> theta;
  unsigned q_max = 20;
  auto* theory = app.add_subcommand("theory", "tabulate closed-form survival laws");
  theory->add_option("--n-max", n_max, "largest n for the fractionated table")->check(CLI::Range(1u, 100000u));
  theory->add_option("--theta", theta, "pulse area (e.g. pi/5) for the sequence table");
  theory->add_option("--q-max", q_max, "largest q for the sequence table");

  RunFlags cal_flags;
  std::string mode = "rabi";
  std::string cal_out;
  double target = 0.10;
  auto* calibrate = app.add_subcommand("calibrate", "Rabi / Ramsey scan fits, or dephasing calibration");
  add_run_flags(calibrate, cal_flags);
  calibrate->add_option("--mode", mode, "scan kind")->check(CLI::IsMember({"rabi", "ramsey", "dephasing"}));
  calibrate->add_option("--target", target, "variant (b) survival for --mode dephasing")
      ->check(CLI::Range(0.0, 1.0));
  calibrate->add_option("--out", cal_out, "directory for scan.csv (default: table to stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const auto result = zeno::cmd_simulate(load(sim_flags), sim_out);
      for (const auto& f : result.files) std::cout << f.string() << '\n';
      std::cout << result.manifest_path.string() << '\n';
    } else if (*analyze) {
      zeno::AnalyzeOptions options;
      options.use_truth = use_truth;
      options.selection = selection == "on"       ? zeno::RunSelection::on
                          : selection == "pooled" ? zeno::RunSelection::pooled
                                                  : zeno::RunSelection::off;
      options.prep_error = prep_error;
      options.false_on = false_on;
      std::vector<fs::path> paths(inputs.begin(), inputs.end());
      const auto report = zeno::cmd_analyze(paths, options);
      report.write(analyze_out);
      std::cout << report.theta_fit << report.survival;
    } else if (*theory) {
      if (theta) {
        std::cout << zeno::cmd_theory_theta(zeno::parse_angle(*theta), q_max);
      } else {
        std::cout << zeno::cmd_theory(n_max);
      }
    } else if (*calibrate) {
      const auto m = mode == "ramsey"      ? zeno::CalibrationMode::ramsey
                     : mode == "dephasing" ? zeno::CalibrationMode::dephasing
                                           : zeno::CalibrationMode::rabi;
      const auto report = zeno::cmd_calibrate(m, load(cal_flags), target);
      if (cal_out.empty()) {
        std::cout << report.table;
      } else {
        fs::create_directories(cal_out);
        zeno::write_text_file(fs::path(cal_out) / "scan.csv", report.table);
      }
      std::cout << report.summary;
    }
  } catch (const zeno::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const zeno::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
