// The four command-line operations as library calls, so they can be tested
// without spawning processes.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zeno/config.hpp"
#include "zeno/io.hpp"
#include "zeno/protocols.hpp"
#include "zeno/stats.hpp"

namespace zeno {

/// Reads a config file, or the `config` field of a manifest.json for replay.
std::string load_config_text(const std::filesystem::path& path);

struct SimulateResult {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest_path;
  RunManifest manifest;
};

/// Runs the configured protocol and writes its data file plus manifest.json
/// into `out_dir` (created if missing).
SimulateResult cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct AnalyzeOptions {
  bool use_truth = false;
  RunSelection selection = RunSelection::off;
  std::optional<double> prep_error;  ///< default: header value
  std::optional<double> false_on;    ///< default: from header detector model
};

/// CSV tables; empty when no input of that kind was given.
///
///   runs.csv      source,q,runs_ge_q,ratio,sigma,v_nominal,v_fit
///   theta_fit.csv source,selection,status,theta_nominal,theta_hat,theta_sigma,alias,p_hat,chi2_dof,transitions
///   survival.csv  n,variant,series,raw_selective,sigma_selective,corrected_selective,
///                 corrected_sigma_selective,raw_nonselective,sigma_nonselective,
///                 corrected_nonselective,eq2,eq3,eq4,clamped
struct AnalyzeReport {
  std::string runs;
  std::string theta_fit;
  std::string survival;

  void write(const std::filesystem::path& out_dir) const;
};

AnalyzeReport cmd_analyze(const std::vector<std::filesystem::path>& in_paths, const AnalyzeOptions& options);

/// `n,eq2,eq3,eq4` for n = 1..n_max.
std::string cmd_theory(unsigned n_max);

/// `q,v` = cos^(2q)(theta/2) for q = 0..q_max.
std::string cmd_theory_theta(double theta, unsigned q_max);

enum class CalibrationMode { rabi, ramsey, dephasing };

struct CalibrationReport {
  std::string table;      ///< step,time_s,bright_fraction,sigma (scans) or n,gamma,survival
  std::string summary;    ///< key=value lines
  SinusoidFit fit;
  double fitted = 0.0;    ///< Omega, |delta| (rad/s) or gamma (1/s)
  bool detected = true;   ///< false when a Ramsey scan shows no fringe
};

/// Rabi: fitted Omega and the pulse area at the configured tau.  Ramsey:
/// fitted fringe frequency |delta| or a "no detectable fringe" flag.
/// Dephasing: gamma giving `target_survival` for the configured variant (b) series.
CalibrationReport cmd_calibrate(CalibrationMode mode, const ExperimentConfig& config,
                                double target_survival = 0.10);

}  // namespace zeno
