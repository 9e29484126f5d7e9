#include "zeno/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

namespace zeno {

// --- run lengths -----------------------------------------------------------

std::size_t RunLengthHistogram::count(Bit outcome, std::size_t q) const {
  const auto& c = counts_.at(outcome);
  return q < c.size() ? c[q] : 0;
}

std::size_t RunLengthHistogram::max_run(Bit outcome) const {
  const auto& c = counts_.at(outcome);
  return c.empty() ? 0 : c.size() - 1;
}

std::size_t RunLengthHistogram::runs_at_least(Bit outcome, std::size_t q) const {
  const auto& c = counts_.at(outcome);
  std::size_t total = 0;
  for (std::size_t k = std::max<std::size_t>(q, 1); k < c.size(); ++k) total += c[k];
  return total;
}

std::size_t RunLengthHistogram::covered_length() const {
  std::size_t total = 0;
  for (const auto& c : counts_) {
    for (std::size_t q = 1; q < c.size(); ++q) total += q * c[q];
  }
  return total;
}

void RunLengthHistogram::add_run(Bit outcome, std::size_t length, std::size_t times) {
  if (outcome > 1) throw std::invalid_argument("RunLengthHistogram: outcome must be 0 or 1");
  if (length == 0 || times == 0) return;
  auto& c = counts_[outcome];
  if (c.size() <= length) c.resize(length + 1, 0);
  c[length] += times;
  total_runs_[outcome] += times;
}

RunLengthHistogram& RunLengthHistogram::operator+=(const RunLengthHistogram& other) {
  for (Bit b = 0; b < 2; ++b) {
    const auto& c = other.counts_[b];
    for (std::size_t q = 1; q < c.size(); ++q) add_run(b, q, c[q]);
  }
  return *this;
}

RunLengthHistogram extract_runs(std::span<const Bit> bits) {
  RunLengthHistogram hist;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= bits.size(); ++i) {
    if (i == bits.size() || bits[i] != bits[start]) {
      hist.add_run(bits[start], i - start);
      start = i;
    }
  }
  return hist;
}

double sequence_ratio(const RunLengthHistogram& hist, std::size_t q, Bit outcome) {
  const std::size_t base = hist.runs_at_least(outcome, 1);
  if (base == 0) throw std::domain_error("sequence_ratio: no runs of the requested outcome");
  if (q == 0) throw std::domain_error("sequence_ratio: q must be >= 1");
  return static_cast<double>(hist.runs_at_least(outcome, q)) / static_cast<double>(base);
}

double exact_ratio(const RunLengthHistogram& hist, std::size_t q, Bit outcome) {
  const std::size_t base = hist.count(outcome, 1);
  if (base == 0) throw std::domain_error("exact_ratio: no runs of length 1");
  return static_cast<double>(hist.count(outcome, q)) / static_cast<double>(base);
}

double theory_v(double q, double theta) {
  if (q < 0.0) throw std::domain_error("theory_v: q must be >= 0");
  if (q == 0.0) return 1.0;
  const double c = std::cos(0.5 * theta);
  return std::pow(c * c, q);
}

// --- theta fit -------------------------------------------------------------

double ThetaFit::theta_sigma() const { return std::sqrt(theta_variance); }

double ThetaFit::alias() const { return 2.0 * std::numbers::pi - theta_hat; }

ThetaFit fit_theta(const RunLengthHistogram& hist, RunSelection selection) {
  auto at_least = [&](std::size_t q) -> double {
    switch (selection) {
      case RunSelection::off: return static_cast<double>(hist.runs_at_least(0, q));
      case RunSelection::on: return static_cast<double>(hist.runs_at_least(1, q));
      case RunSelection::pooled:
        return static_cast<double>(hist.runs_at_least(0, q) + hist.runs_at_least(1, q));
    }
    return 0.0;
  };

  if (at_least(1) == 0.0 || at_least(2) == 0.0) {
    throw FitError("fit_theta: fewer than two populated run-length bins");
  }

  std::vector<double> increments;
  std::vector<double> trials;
  for (std::size_t q = 2;; ++q) {
    const double here = at_least(q);
    if (here == 0.0) break;
    const double prev = at_least(q - 1);
    increments.push_back(std::log(here / prev));
    trials.push_back(prev);
  }

  double sum_w = 0.0;
  double sum_wd = 0.0;
  for (std::size_t j = 0; j < increments.size(); ++j) {
    sum_w += trials[j];
    sum_wd += trials[j] * increments[j];
  }
  const double log_p = sum_wd / sum_w;

  ThetaFit fit;
  fit.p_hat = std::min(std::exp(log_p), 1.0);
  fit.theta_hat = 2.0 * std::acos(std::sqrt(fit.p_hat));
  fit.p_hat = std::cos(0.5 * fit.theta_hat) * std::cos(0.5 * fit.theta_hat);
  fit.transitions = increments.size();
  fit.trials = sum_w;
  // Var(ln p) = (1-p)/(p T) and d(theta)/d(ln p) = -sqrt(p/(1-p)) give Var(theta) = 1/T.
  fit.theta_variance = 1.0 / sum_w;

  if (increments.size() > 1 && fit.p_hat < 1.0) {
    const double scale = fit.p_hat / (1.0 - fit.p_hat);
    double chi2 = 0.0;
    for (std::size_t j = 0; j < increments.size(); ++j) {
      const double d = increments[j] - log_p;
      chi2 += scale * trials[j] * d * d;
    }
    fit.residual = chi2 / static_cast<double>(increments.size() - 1);
  }
  return fit;
}

// --- closed forms ----------------------------------------------------------

namespace {

void require_n(unsigned n) {
  if (n < 1) throw std::domain_error("fractionation n must be >= 1");
}

// cos^2(pi/2n) through the half-angle identity, exact at n = 1 and n = 2.
double half_angle_cos2(unsigned n) { return 0.5 * (1.0 + std::cos(std::numbers::pi / n)); }

}  // namespace

double p00_selective(unsigned n) {
  require_n(n);
  return std::pow(half_angle_cos2(n), static_cast<double>(n));
}

double p00_plus_p01(unsigned n) {
  require_n(n);
  return std::pow(half_angle_cos2(n), static_cast<double>(n) - 1.0);
}

double p00_nonselective(unsigned n) {
  require_n(n);
  return 0.5 * (1.0 + std::pow(std::cos(std::numbers::pi / n), static_cast<double>(n)));
}

// --- survival estimates ----------------------------------------------------

namespace {

void check_records(std::span<const SeriesRecord> records, const SeriesView& view) {
  if (records.empty()) throw std::invalid_argument("survival estimate: no series records");
  if (view.n < 1) throw std::invalid_argument("survival estimate: n must be >= 1");
  const std::size_t probes =
      view.variant == Variant::fractionated_with_probe ? std::size_t{view.n} : std::size_t{1};
  for (const auto& r : records) {
    if (r.intermediate_bits.size() + 1 != probes) {
      throw std::invalid_argument("survival estimate: record bit count does not match variant");
    }
    if (view.use_truth && r.true_bits.size() != probes) {
      throw std::invalid_argument("survival estimate: record lacks simulation-truth bits");
    }
  }
}

// Observed bits of one record: n-1 intermediate then the final one.
std::vector<Bit> observed(const SeriesRecord& r, bool use_truth) {
  if (use_truth) return r.true_bits;
  std::vector<Bit> bits = r.intermediate_bits;
  bits.push_back(r.final_bit);
  return bits;
}

template <typename Favourable>
SurvivalEstimate frequency(std::span<const SeriesRecord> records, const SeriesView& view,
                           SurvivalMode mode, Favourable&& favourable) {
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (favourable(observed(r, view.use_truth))) ++hits;
  }
  SurvivalEstimate e;
  e.n = view.n;
  e.series = records.size();
  e.mode = mode;
  e.raw_frequency = static_cast<double>(hits) / static_cast<double>(records.size());
  e.sigma = std::sqrt(e.raw_frequency * (1.0 - e.raw_frequency) / static_cast<double>(records.size()));
  e.corrected_frequency = e.raw_frequency;
  e.corrected_sigma = e.sigma;
  return e;
}

bool none_on(std::span<const Bit> bits) {
  return std::all_of(bits.begin(), bits.end(), [](Bit b) { return b == 0; });
}

}  // namespace

SurvivalEstimate estimate_selective(std::span<const SeriesRecord> records, SeriesView view) {
  if (view.variant != Variant::fractionated_with_probe) {
    throw std::invalid_argument("estimate_selective: requires variant (c) records");
  }
  check_records(records, view);
  return frequency(records, view, SurvivalMode::selective,
                   [](const std::vector<Bit>& bits) { return none_on(bits); });
}

SurvivalEstimate estimate_conditional(std::span<const SeriesRecord> records, SeriesView view) {
  if (view.variant != Variant::fractionated_with_probe) {
    throw std::invalid_argument("estimate_conditional: requires variant (c) records");
  }
  check_records(records, view);
  return frequency(records, view, SurvivalMode::selective, [](const std::vector<Bit>& bits) {
    return none_on(std::span<const Bit>{bits}.first(bits.size() - 1));
  });
}

SurvivalEstimate estimate_nonselective(std::span<const SeriesRecord> records, SeriesView view) {
  check_records(records, view);
  return frequency(records, view, SurvivalMode::nonselective,
                   [](const std::vector<Bit>& bits) { return bits.back() == 0; });
}

CorrectedValue correct_estimate(double raw, double f_prep, double p_false_on, unsigned n) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(raw) || !in_unit(f_prep) || !in_unit(p_false_on)) {
    throw std::domain_error("correct_estimate: inputs must lie in [0,1]");
  }
  const double factor = (1.0 - f_prep) * (1.0 - static_cast<double>(n) * p_false_on);
  if (!(factor > 0.0)) throw std::domain_error("correct_estimate: invalid correction (factor <= 0)");
  CorrectedValue out;
  out.factor = factor;
  out.value = raw / factor;
  if (out.value > 1.0) {
    out.value = 1.0;
    out.clamped = true;
  }
  return out;
}

SurvivalEstimate apply_correction(SurvivalEstimate estimate, double f_prep, double p_false_on) {
  // Non-selective survival reads a single probe per series.
  const unsigned probes = estimate.mode == SurvivalMode::selective ? estimate.n : 1u;
  const CorrectedValue c = correct_estimate(estimate.raw_frequency, f_prep, p_false_on, probes);
  estimate.corrected_frequency = c.value;
  estimate.corrected_sigma = estimate.sigma / c.factor;
  estimate.clamped = c.clamped;
  return estimate;
}

// --- sinusoid fit ----------------------------------------------------------

namespace {

struct LinearSolution {
  Eigen::Vector3d coef;
  double chi2;
};

LinearSolution linear_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma, double omega) {
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    const Eigen::Vector3d row{1.0, std::cos(omega * x[i]), std::sin(omega * x[i])};
    normal += w * row * row.transpose();
    rhs += w * y[i] * row;
  }
  LinearSolution s;
  s.coef = normal.ldlt().solve(rhs);
  s.chi2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double model = s.coef[0] + s.coef[1] * std::cos(omega * x[i]) + s.coef[2] * std::sin(omega * x[i]);
    const double r = (y[i] - model) / sigma[i];
    s.chi2 += r * r;
  }
  return s;
}

}  // namespace

SinusoidFit fit_sinusoid(std::span<const double> x, std::span<const double> y,
                         std::span<const double> sigma, double omega_min, double omega_max) {
  if (x.size() != y.size() || x.size() != sigma.size()) {
    throw std::invalid_argument("fit_sinusoid: x, y and sigma sizes differ");
  }
  if (x.size() < 5) throw FitError("fit_sinusoid: need at least five points");
  if (!(omega_min > 0.0) || !(omega_max > omega_min)) {
    throw std::invalid_argument("fit_sinusoid: invalid frequency search range");
  }
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double span = *hi_it - *lo_it;
  if (!(span > 0.0)) throw FitError("fit_sinusoid: degenerate abscissa");

  const double grid = std::numbers::pi / (4.0 * span);
  double best_omega = omega_min;
  double best_chi2 = std::numeric_limits<double>::infinity();
  for (double w = omega_min; w <= omega_max; w += grid) {
    const double chi2 = linear_fit(x, y, sigma, w).chi2;
    if (chi2 < best_chi2) {
      best_chi2 = chi2;
      best_omega = w;
    }
  }

  // Golden-section refinement inside one grid cell either side.
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(omega_min, best_omega - grid);
  double b = std::min(omega_max, best_omega + grid);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = linear_fit(x, y, sigma, c).chi2;
  double fd = linear_fit(x, y, sigma, d).chi2;
  for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = linear_fit(x, y, sigma, c).chi2;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = linear_fit(x, y, sigma, d).chi2;
    }
  }
  const double omega = 0.5 * (a + b);
  const LinearSolution sol = linear_fit(x, y, sigma, omega);
  const double off = sol.coef[0];
  const double bc = sol.coef[1];
  const double bs = sol.coef[2];

  Eigen::Matrix4d normal = Eigen::Matrix4d::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    const double cs = std::cos(omega * x[i]);
    const double sn = std::sin(omega * x[i]);
    const Eigen::Vector4d row{1.0, cs, sn, x[i] * (-bc * sn + bs * cs)};
    normal += w * row * row.transpose();
  }
  const Eigen::Matrix4d cov = normal.completeOrthogonalDecomposition().pseudoInverse();

  SinusoidFit fit;
  fit.offset = off;
  fit.amplitude = std::hypot(bc, bs);
  fit.phase = std::atan2(-bs, bc);
  fit.frequency = omega;
  fit.frequency_sigma = std::sqrt(std::max(cov(3, 3), 0.0));
  if (fit.amplitude > 0.0) {
    const Eigen::Vector4d grad{0.0, bc / fit.amplitude, bs / fit.amplitude, 0.0};
    fit.amplitude_sigma = std::sqrt(std::max(grad.dot(cov * grad), 0.0));
  } else {
    fit.amplitude_sigma = std::sqrt(std::max(0.5 * (cov(1, 1) + cov(2, 2)), 0.0));
  }
  fit.chi2 = sol.chi2;
  fit.dof = x.size() - 4;
  return fit;
}

std::vector<double> binomial_sigmas(std::span<const double> fractions, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("binomial_sigmas: trials must be > 0");
  const double n = static_cast<double>(trials);
  std::vector<double> out;
  out.reserve(fractions.size());
  for (double p : fractions) {
    const double shrunk = (p * n + 0.5) / (n + 1.0);
    out.push_back(std::sqrt(shrunk * (1.0 - shrunk) / n));
  }
  return out;
}

}  // namespace zeno
