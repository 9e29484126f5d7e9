#include "zeno/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace zeno {

namespace {

constexpr int kGround = index_of(Level::ground);
constexpr int kMinus = index_of(Level::minus);
constexpr int kUpper = index_of(Level::upper);
constexpr int kPlus = index_of(Level::plus);

}  // namespace

void DetectorModel::validate() const {
  if (!(mean_counts_dark >= 0.0) || !std::isfinite(mean_counts_bright)) {
    throw std::invalid_argument("DetectorModel: mean counts must be finite and >= 0");
  }
  if (!(mean_counts_bright > mean_counts_dark)) {
    throw std::invalid_argument("DetectorModel: bright mean counts must exceed dark mean counts");
  }
  if (threshold < 1) throw std::invalid_argument("DetectorModel: threshold must be >= 1");
}

std::pair<Bit, SpinState> project(const SpinState& state, Rng& rng) {
  const double bright = state.bright_population() / (state.bright_population() + state.population(Level::ground));
  Vector4c a = state.amplitudes();
  // uniform() < bright never selects a zero-probability branch.
  if (rng.uniform() < bright) {
    a[kGround] = 0.0;
    return {Bit{1}, SpinState{a}};
  }
  a[kMinus] = a[kUpper] = a[kPlus] = 0.0;
  return {Bit{0}, SpinState{a}};
}

std::uint32_t sample_counts(Bit manifold, const DetectorModel& model, Rng& rng) {
  return rng.poisson(manifold ? model.mean_counts_bright : model.mean_counts_dark);
}

SpinState zeeman_pump(const SpinState& state, const NoiseParams& params, Rng& rng) {
  const double jump = params.zeeman_pump_prob * state.population(Level::upper);
  if (jump == 0.0) return state;
  const double u = rng.uniform();
  if (u < jump) {
    return SpinState::basis(u < 0.5 * jump ? Level::minus : Level::plus);
  }
  // No-jump branch: the m=0 amplitude is damped by sqrt(1 - eps).
  Vector4c a = state.amplitudes();
  a[kUpper] *= std::sqrt(1.0 - params.zeeman_pump_prob);
  return SpinState{a};
}

ProbeOutcome probe(const SpinState& state, const DetectorModel& model, const NoiseParams& params, Rng& rng) {
  auto [manifold, post] = project(state, rng);
  if (manifold == 1) post = zeeman_pump(post, params, rng);
  const std::uint32_t count = sample_counts(manifold, model, rng);
  return ProbeOutcome{manifold, count, classify(count, model), post};
}

double poisson_cdf(long k, double mean) {
  if (k < 0) return 0.0;
  double term = std::exp(-mean);
  double sum = term;
  for (long i = 1; i <= k; ++i) {
    term *= mean / static_cast<double>(i);
    sum += term;
  }
  return std::min(sum, 1.0);
}

FalseRates false_rates(const DetectorModel& model) {
  const long below = static_cast<long>(model.threshold) - 1;
  return FalseRates{1.0 - poisson_cdf(below, model.mean_counts_dark),
                    poisson_cdf(below, model.mean_counts_bright)};
}

DensityMatrix measure_density(const DensityMatrix& rho) {
  Matrix4c m = rho.entries();
  for (int k = 1; k < 4; ++k) {
    m(kGround, k) = 0.0;
    m(k, kGround) = 0.0;
  }
  return DensityMatrix::from_trusted(m);
}

DensityMatrix zeeman_pump_density(const DensityMatrix& rho, const NoiseParams& params) {
  const double eps = params.zeeman_pump_prob;
  if (eps == 0.0) return rho;
  // Kraus set: sqrt(eps/2)|+-1><m0|, and identity with sqrt(1-eps) on m0.
  Matrix4c k0 = Matrix4c::Identity();
  k0(kUpper, kUpper) = std::sqrt(1.0 - eps);
  Matrix4c m = k0 * rho.entries() * k0.adjoint();
  const Complex moved = 0.5 * eps * rho.entries()(kUpper, kUpper);
  m(kMinus, kMinus) += moved;
  m(kPlus, kPlus) += moved;
  return DensityMatrix::from_trusted(m);
}

DensityMatrix probe_density(const DensityMatrix& rho, const NoiseParams& params) {
  // The pump acts only after a bright projection; on a measured state the
  // dark block has no m=0 weight, so applying it to the whole matrix is exact.
  return zeeman_pump_density(measure_density(rho), params);
}

}  // namespace zeno
