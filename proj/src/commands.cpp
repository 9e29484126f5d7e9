#include "zeno/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <tuple>

#include "zeno/config.hpp"

namespace zeno {

namespace fs = std::filesystem;

std::string load_config_text(const fs::path& path) {
  std::string text = read_text_file(path);
  if (path.extension() == ".json") return RunManifest::from_json(text).config;
  return text;
}

namespace {

std::string series_file_name(const ExperimentConfig& c) {
  return "series_n" + std::to_string(c.fractionation) + "_" + std::string(to_string(c.variant)) + ".txt";
}

std::string scan_table(const ScanResult& scan) {
  const std::vector<double> fraction = scan.bright_fraction();
  const std::vector<double> sigma = binomial_sigmas(fraction, scan.bits.size());
  std::ostringstream out;
  out << "step,time_s,bright_fraction,sigma\n";
  for (std::size_t k = 0; k < scan.times.size(); ++k) {
    out << k + 1 << ',' << format_double(scan.times[k]) << ',' << format_double(fraction[k]) << ','
        << format_double(sigma[k]) << '\n';
  }
  return out.str();
}

}  // namespace

SimulateResult cmd_simulate(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw std::runtime_error("simulate: cannot create output directory '" + out_dir.string() + "'");
  }

  std::string name;
  std::ostringstream data;
  switch (config.protocol) {
    case Protocol::zeno:
      name = "trajectory.txt";
      write_trajectory(data, run_zeno_trajectory(config));
      break;
    case Protocol::fractionated:
      name = series_file_name(config);
      write_series(data, config, run_fractionated_pi(config));
      break;
    case Protocol::rabi:
      name = "rabi_scan.csv";
      data << scan_table(run_rabi_scan(config, config.scan.step, config.scan.steps, config.scan.trajectories));
      break;
    case Protocol::ramsey:
      name = "ramsey_scan.csv";
      data << scan_table(run_ramsey_scan(config, config.scan.step, config.scan.steps, config.scan.trajectories));
      break;
  }

  SimulateResult result;
  const std::string bytes = data.str();
  const fs::path data_path = out_dir / name;
  write_text_file(data_path, bytes);
  result.files.push_back(data_path);

  result.manifest.config = emit_config(config);
  result.manifest.master_seed = config.master_seed;
  result.manifest.digests[name] = sha256_hex(bytes);
  result.manifest_path = out_dir / "manifest.json";
  write_text_file(result.manifest_path, result.manifest.to_json());
  return result;
}

// --- analyze ---------------------------------------------------------------

void AnalyzeReport::write(const fs::path& out_dir) const {
  fs::create_directories(out_dir);
  if (!runs.empty()) write_text_file(out_dir / "runs.csv", runs);
  if (!theta_fit.empty()) write_text_file(out_dir / "theta_fit.csv", theta_fit);
  if (!survival.empty()) write_text_file(out_dir / "survival.csv", survival);
}

namespace {

std::string_view selection_name(RunSelection s) {
  switch (s) {
    case RunSelection::off: return "off";
    case RunSelection::on: return "on";
    case RunSelection::pooled: return "pooled";
  }
  return "?";
}

std::size_t selected_at_least(const RunLengthHistogram& h, RunSelection s, std::size_t q) {
  switch (s) {
    case RunSelection::off: return h.runs_at_least(0, q);
    case RunSelection::on: return h.runs_at_least(1, q);
    case RunSelection::pooled: return h.runs_at_least(0, q) + h.runs_at_least(1, q);
  }
  return 0;
}

struct SurvivalRow {
  unsigned n;
  Variant variant;
  std::size_t series;
  std::optional<SurvivalEstimate> selective;
  SurvivalEstimate nonselective;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("analyze: cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

AnalyzeReport cmd_analyze(const std::vector<fs::path>& in_paths, const AnalyzeOptions& options) {
  std::ostringstream runs;
  std::ostringstream fits;
  std::vector<SurvivalRow> rows;

  for (const fs::path& path : in_paths) {
    Protocol protocol;
    {
      auto in = open_input(path);
      protocol = peek_protocol(in);
    }
    auto in = open_input(path);
    const std::string source = path.filename().string();

    if (protocol == Protocol::zeno) {
      const TrajectoryFile file = read_trajectory(in);
      const std::vector<Bit> bits = file.bits(options.use_truth);
      const RunLengthHistogram hist = extract_runs(bits);
      const double nominal = file.config.pulse.area();

      std::optional<ThetaFit> fit;
      fits << source << ',' << selection_name(options.selection) << ',';
      try {
        fit = fit_theta(hist, options.selection);
        fits << "ok," << format_double(nominal) << ',' << format_double(fit->theta_hat) << ','
             << format_double(fit->theta_sigma()) << ',' << format_double(fit->alias()) << ','
             << format_double(fit->p_hat) << ',' << format_double(fit->residual) << ',' << fit->transitions << '\n';
      } catch (const FitError&) {
        fits << "underdetermined," << format_double(nominal) << ",,,,,,0\n";
      }

      const std::size_t base = selected_at_least(hist, options.selection, 1);
      for (std::size_t q = 1; base > 0; ++q) {
        const std::size_t at_least = selected_at_least(hist, options.selection, q);
        if (at_least == 0) break;
        const double ratio = static_cast<double>(at_least) / static_cast<double>(base);
        const double sigma = std::sqrt(ratio * (1.0 - ratio) / static_cast<double>(base));
        runs << source << ',' << q << ',' << at_least << ',' << format_double(ratio) << ','
             << format_double(sigma) << ',' << format_double(theory_v(static_cast<double>(q - 1), nominal)) << ',';
        if (fit) runs << format_double(theory_v(static_cast<double>(q - 1), fit->theta_hat));
        runs << '\n';
      }
    } else if (protocol == Protocol::fractionated) {
      const SeriesFile file = read_series(in);
      const ExperimentConfig& c = file.config;
      const SeriesView view{c.variant, c.fractionation, options.use_truth};
      const double f_prep = options.prep_error.value_or(c.noise.preparation_error);
      const double false_on = options.false_on.value_or(false_rates(c.detector).false_on);

      SurvivalRow row{c.fractionation, c.variant, file.records.size(), std::nullopt,
                      apply_correction(estimate_nonselective(file.records, view), f_prep, false_on)};
      if (c.variant == Variant::fractionated_with_probe) {
        row.selective = apply_correction(estimate_selective(file.records, view), f_prep, false_on);
      }
      rows.push_back(row);
    } else {
      throw std::runtime_error("analyze: '" + path.string() + "' is not a trajectory or series file");
    }
  }

  AnalyzeReport report;
  if (!runs.str().empty()) report.runs = "source,q,runs_ge_q,ratio,sigma,v_nominal,v_fit\n" + runs.str();
  if (!fits.str().empty()) {
    report.theta_fit =
        "source,selection,status,theta_nominal,theta_hat,theta_sigma,alias,p_hat,chi2_dof,transitions\n" + fits.str();
  }
  if (!rows.empty()) {
    std::stable_sort(rows.begin(), rows.end(), [](const SurvivalRow& a, const SurvivalRow& b) {
      return std::tuple(a.n, static_cast<int>(a.variant)) < std::tuple(b.n, static_cast<int>(b.variant));
    });
    std::ostringstream out;
    out << "n,variant,series,raw_selective,sigma_selective,corrected_selective,corrected_sigma_selective,"
           "raw_nonselective,sigma_nonselective,corrected_nonselective,eq2,eq3,eq4,clamped\n";
    for (const auto& r : rows) {
      out << r.n << ',' << to_string(r.variant) << ',' << r.series << ',';
      if (r.selective) {
        out << format_double(r.selective->raw_frequency) << ',' << format_double(r.selective->sigma) << ','
            << format_double(r.selective->corrected_frequency) << ',' << format_double(r.selective->corrected_sigma)
            << ',';
      } else {
        out << ",,,,";
      }
      const bool clamped = r.nonselective.clamped || (r.selective && r.selective->clamped);
      out << format_double(r.nonselective.raw_frequency) << ',' << format_double(r.nonselective.sigma) << ','
          << format_double(r.nonselective.corrected_frequency) << ',' << format_double(p00_selective(r.n)) << ','
          << format_double(p00_plus_p01(r.n)) << ',' << format_double(p00_nonselective(r.n)) << ','
          << (clamped ? 1 : 0) << '\n';
    }
    report.survival = out.str();
  }
  return report;
}

// --- theory ----------------------------------------------------------------

std::string cmd_theory(unsigned n_max) {
  std::ostringstream out;
  out << "n,eq2,eq3,eq4\n";
  for (unsigned n = 1; n <= n_max; ++n) {
    out << n << ',' << format_double(p00_selective(n)) << ',' << format_double(p00_plus_p01(n)) << ','
        << format_double(p00_nonselective(n)) << '\n';
  }
  return out.str();
}

std::string cmd_theory_theta(double theta, unsigned q_max) {
  std::ostringstream out;
  out << "q,v\n";
  for (unsigned q = 0; q <= q_max; ++q) out << q << ',' << format_double(theory_v(q, theta)) << '\n';
  return out.str();
}

// --- calibrate -------------------------------------------------------------

CalibrationReport cmd_calibrate(CalibrationMode mode, const ExperimentConfig& config, double target_survival) {
  CalibrationReport report;
  std::ostringstream summary;

  if (mode == CalibrationMode::dephasing) {
    ExperimentConfig c = config;
    c.protocol = Protocol::fractionated;
    c.variant = Variant::fractionated_no_probe;
    report.fitted = calibrate_dephasing(c, target_survival);
    c.noise.dephasing_rate = report.fitted;
    std::ostringstream table;
    table << "n,gamma_per_s,survival\n";
    for (unsigned n = 1; n <= c.fractionation; ++n) {
      ExperimentConfig row = c;
      row.fractionation = n;
      row.pulse.rabi_frequency = std::numbers::pi / n / c.pulse.duration;
      table << n << ',' << format_double(report.fitted) << ',' << format_double(oracle_series_survival(row)) << '\n';
    }
    report.table = table.str();
    summary << "mode=dephasing\n"
            << "target_survival=" << format_double(target_survival) << '\n'
            << "n=" << c.fractionation << '\n'
            << "dephasing=" << format_double(report.fitted) << "/s\n";
    report.summary = summary.str();
    return report;
  }

  const ScanSettings& s = config.scan;
  const ScanResult scan = mode == CalibrationMode::rabi ? run_rabi_scan(config, s.step, s.steps, s.trajectories)
                                                         : run_ramsey_scan(config, s.step, s.steps, s.trajectories);
  report.table = scan_table(scan);
  const std::vector<double> fraction = scan.bright_fraction();
  const std::vector<double> sigma = binomial_sigmas(fraction, scan.bits.size());
  const double span = scan.times.back() - scan.times.front();
  const double nyquist = std::numbers::pi / s.step;
  if (!(span > 0.0)) throw FitError("calibrate: scan needs at least two steps");

  report.fit = fit_sinusoid(scan.times, fraction, sigma, std::numbers::pi / span, nyquist);
  report.detected = report.fit.detected();
  report.fitted = report.fit.frequency;

  if (mode == CalibrationMode::rabi) {
    if (!report.detected) throw FitError("calibrate: Rabi scan shows no nutation (degenerate scan)");
    summary << "mode=rabi\n"
            << "omega=" << format_double(report.fitted) << "rad/s\n"
            << "omega_sigma=" << format_double(report.fit.frequency_sigma) << "rad/s\n"
            << "theta_at_tau=" << format_double(report.fitted * config.pulse.duration) << "rad\n"
            << "tau=" << format_double(config.pulse.duration) << "s\n";
  } else {
    summary << "mode=ramsey\n";
    if (report.detected) {
      summary << "fringe=detected\n"
              << "detuning=" << format_double(report.fitted) << "rad/s\n"
              << "detuning_sigma=" << format_double(report.fit.frequency_sigma) << "rad/s\n";
    } else {
      report.fitted = 0.0;
      summary << "fringe=none\n"
              << "note=no detectable fringe\n";
    }
  }
  summary << "amplitude=" << format_double(report.fit.amplitude) << '\n'
          << "amplitude_sigma=" << format_double(report.fit.amplitude_sigma) << '\n'
          << "chi2_dof=" << format_double(report.fit.dof ? report.fit.chi2 / report.fit.dof : 0.0) << '\n';
  report.summary = summary.str();
  return report;
}

}  // namespace zeno
