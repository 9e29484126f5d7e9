// Run-length statistics, theta fits, selective / non-selective survival
// estimates with corrections, and the closed-form survival laws.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "zeno/detector.hpp"
#include "zeno/protocols.hpp"

namespace zeno {

class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exact-length counts of maximal runs, per outcome.
class RunLengthHistogram {
public:
  /// counts(b)[q] = number of maximal runs of exactly q results equal to b (index 0 unused).
  [[nodiscard]] const std::vector<std::size_t>& counts(Bit outcome) const { return counts_.at(outcome); }
  [[nodiscard]] std::size_t count(Bit outcome, std::size_t q) const;
  [[nodiscard]] std::size_t total_runs(Bit outcome) const { return total_runs_.at(outcome); }
  [[nodiscard]] std::size_t max_run(Bit outcome) const;
  /// Number of runs of length >= q.
  [[nodiscard]] std::size_t runs_at_least(Bit outcome, std::size_t q) const;
  /// Sum of q * counts over both outcomes.
  [[nodiscard]] std::size_t covered_length() const;
  [[nodiscard]] bool empty() const { return total_runs_[0] + total_runs_[1] == 0; }

  void add_run(Bit outcome, std::size_t length, std::size_t times = 1);
  RunLengthHistogram& operator+=(const RunLengthHistogram& other);

  bool operator==(const RunLengthHistogram&) const = default;

private:
  std::array<std::vector<std::size_t>, 2> counts_{};
  std::array<std::size_t, 2> total_runs_{};
};

/// Maximal-run decomposition; runs cut by the start or end are included.
RunLengthHistogram extract_runs(std::span<const Bit> bits);

/// U(q)/U(1) with cumulative counting: N(run >= q) / N(run >= 1).
/// Throws std::domain_error when there are no runs of `outcome`.
double sequence_ratio(const RunLengthHistogram& hist, std::size_t q, Bit outcome = 0);

/// Exact-length convention: N(run == q) / N(run == 1).
double exact_ratio(const RunLengthHistogram& hist, std::size_t q, Bit outcome = 0);

/// V(q) = cos^(2q)(theta / 2).
double theory_v(double q, double theta);

/// Which runs enter a theta fit.
enum class RunSelection { off, on, pooled };

struct ThetaFit {
  double theta_hat = 0.0;       ///< in [0, pi]
  double p_hat = 0.0;           ///< cos^2(theta_hat / 2)
  double residual = 0.0;        ///< chi^2 per degree of freedom (0 with a single transition)
  double theta_variance = 0.0;
  std::size_t transitions = 0;  ///< q -> q+1 steps that entered the fit
  double trials = 0.0;          ///< sum of N(run >= q) over those steps

  [[nodiscard]] double theta_sigma() const;
  /// The degenerate partner 2 pi - theta_hat, indistinguishable in p.
  [[nodiscard]] double alias() const;
};

/// Weighted least squares of ln(U(q)/U(1)) against (q-1) ln p.
///
/// The cumulative ratios form a random walk whose increments
/// ln(N(>=q+1)/N(>=q)) are independent with binomial variance
/// (1-p)/(p N(>=q)); the generalized least-squares slope is therefore the
/// N(>=q)-weighted mean of those increments.  Steps into an empty bin are
/// dropped.  Throws FitError when fewer than two q bins are populated.
ThetaFit fit_theta(const RunLengthHistogram& hist, RunSelection selection = RunSelection::off);

/// Selective survival of all n probes: cos^(2n)(pi / 2n).
double p00_selective(unsigned n);
/// Survival of the first n-1 probes: cos^(2n-2)(pi / 2n).
double p00_plus_p01(unsigned n);
/// Non-selective survival: (1 + cos^n(pi / n)) / 2.
double p00_nonselective(unsigned n);

enum class SurvivalMode { selective, nonselective };

struct SurvivalEstimate {
  unsigned n = 1;
  std::size_t series = 0;
  double raw_frequency = 0.0;
  double corrected_frequency = 0.0;
  double sigma = 0.0;            ///< binomial sigma of raw_frequency
  double corrected_sigma = 0.0;
  bool clamped = false;
  SurvivalMode mode = SurvivalMode::selective;
};

struct SeriesView {
  Variant variant;
  unsigned n;
  bool use_truth = false;  ///< read simulation-truth bits instead of classified ones
};

/// Fraction of series whose every observation was "off".  Requires variant (c).
SurvivalEstimate estimate_selective(std::span<const SeriesRecord> records, SeriesView view);

/// Fraction with n-1 "off" then any final result; converges to p00_plus_p01.
SurvivalEstimate estimate_conditional(std::span<const SeriesRecord> records, SeriesView view);

/// Fraction of series whose final observation was "off".
SurvivalEstimate estimate_nonselective(std::span<const SeriesRecord> records, SeriesView view);

struct CorrectedValue {
  double value = 0.0;
  double factor = 1.0;
  bool clamped = false;
};

/// raw / ((1 - f_prep)(1 - n p_false_on)), clamped to [0,1].
/// Throws std::domain_error when the factor is <= 0 or inputs leave [0,1].
CorrectedValue correct_estimate(double raw, double f_prep, double p_false_on, unsigned n);

/// Fills the corrected fields of `estimate`.
SurvivalEstimate apply_correction(SurvivalEstimate estimate, double f_prep, double p_false_on);

struct SinusoidFit {
  double offset = 0.0;
  double amplitude = 0.0;  ///< >= 0
  double phase = 0.0;      ///< model: offset + amplitude cos(frequency x + phase)
  double frequency = 0.0;  ///< rad per unit x
  double frequency_sigma = 0.0;
  double amplitude_sigma = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;

  /// Amplitude significant at four sigma.
  [[nodiscard]] bool detected() const { return amplitude > 4.0 * amplitude_sigma; }
};

/// Weighted sinusoid fit: periodogram search over [omega_min, omega_max],
/// golden-section refinement, covariance from the Gauss-Newton normal matrix.
SinusoidFit fit_sinusoid(std::span<const double> x, std::span<const double> y,
                         std::span<const double> sigma, double omega_min, double omega_max);

/// Per-step binomial sigma of a bright fraction over `trials` shots, floored
/// away from zero for all-0 / all-1 steps.
std::vector<double> binomial_sigmas(std::span<const double> fractions, std::size_t trials);

}  // namespace zeno
