#include "zeno/spin.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace zeno {

namespace {

constexpr int kGround = index_of(Level::ground);
constexpr int kUpper = index_of(Level::upper);

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void PulseSpec::validate() const {
  if (!(duration >= 0.0)) throw std::invalid_argument("PulseSpec: duration must be >= 0");
  if (!(rabi_frequency >= 0.0)) throw std::invalid_argument("PulseSpec: Rabi frequency must be >= 0");
  if (!std::isfinite(detuning) || !std::isfinite(phase)) {
    throw std::invalid_argument("PulseSpec: detuning and phase must be finite");
  }
}

void NoiseParams::validate() const {
  if (!(dephasing_rate >= 0.0) || !std::isfinite(dephasing_rate)) {
    throw std::invalid_argument("NoiseParams: dephasing rate must be finite and >= 0");
  }
  if (!is_probability(zeeman_pump_prob)) throw std::invalid_argument("NoiseParams: Zeeman pump probability outside [0,1]");
  if (!is_probability(preparation_error)) throw std::invalid_argument("NoiseParams: preparation error outside [0,1]");
}

// --- SpinState -------------------------------------------------------------

SpinState::SpinState(const Vector4c& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("SpinState: amplitudes must have finite non-zero norm");
  amplitudes_ = amplitudes / n;
}

SpinState SpinState::basis(Level level) {
  Vector4c a = Vector4c::Zero();
  a[index_of(level)] = 1.0;
  return from_normalized(a);
}

SpinState SpinState::from_normalized(const Vector4c& amplitudes) {
  SpinState s;
  s.amplitudes_ = amplitudes;
  return s;
}

double SpinState::bright_population() const {
  return population(Level::minus) + population(Level::upper) + population(Level::plus);
}

// --- DensityMatrix ---------------------------------------------------------

DensityMatrix::DensityMatrix(const SpinState& pure) {
  const Vector4c& a = pure.amplitudes();
  rho_ = a * a.adjoint();
}

DensityMatrix::DensityMatrix(const Matrix4c& entries) : rho_{entries} {
  if (!is_physical()) throw std::invalid_argument("DensityMatrix: entries are not a valid density matrix");
}

DensityMatrix DensityMatrix::from_trusted(const Matrix4c& entries) {
  DensityMatrix d;
  d.rho_ = entries;
  return d;
}

DensityMatrix DensityMatrix::mixed_drive_subspace() {
  Matrix4c m = Matrix4c::Zero();
  m(kGround, kGround) = 0.5;
  m(kUpper, kUpper) = 0.5;
  return from_trusted(m);
}

std::array<double, 4> DensityMatrix::populations() const {
  return {rho_(0, 0).real(), rho_(1, 1).real(), rho_(2, 2).real(), rho_(3, 3).real()};
}

double DensityMatrix::min_eigenvalue() const {
  // Hermitian part only; anti-Hermitian residue is checked separately.
  const Matrix4c h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool DensityMatrix::is_physical(double tol) const {
  if (!rho_.allFinite()) return false;
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho_.trace() - Complex{1.0, 0.0}) > tol) return false;
  return min_eigenvalue() >= -1e-10;
}

// --- propagators -----------------------------------------------------------

Matrix2c pulse_propagator(const PulseSpec& pulse) {
  const double omega = pulse.rabi_frequency;
  const double delta = pulse.detuning;
  const double w = std::hypot(omega, delta);
  const double angle = 0.5 * w * pulse.duration;
  if (w == 0.0 || angle == 0.0) return Matrix2c::Identity();

  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Complex i{0.0, 1.0};
  const Complex coupling = omega / w * std::polar(1.0, pulse.phase);
  const double nz = delta / w;

  // U = cos(angle) I - i sin(angle) n.sigma, with n = (Omega cos phi, Omega sin phi, delta) / W.
  Matrix2c u;
  u(0, 0) = Complex{c, s * nz};
  u(1, 1) = Complex{c, -s * nz};
  u(0, 1) = -i * s * coupling;
  u(1, 0) = -i * s * std::conj(coupling);
  return u;
}

Matrix4c embed_drive(const Matrix2c& op) {
  Matrix4c m = Matrix4c::Identity();
  m(kGround, kGround) = op(0, 0);
  m(kGround, kUpper) = op(0, 1);
  m(kUpper, kGround) = op(1, 0);
  m(kUpper, kUpper) = op(1, 1);
  return m;
}

namespace {

Vector4c rotate_drive(const Vector4c& a, const Matrix2c& u) {
  Vector4c out = a;
  out[kGround] = u(0, 0) * a[kGround] + u(0, 1) * a[kUpper];
  out[kUpper] = u(1, 0) * a[kGround] + u(1, 1) * a[kUpper];
  return out;
}

Matrix2c precession(double gap, double detuning) {
  return pulse_propagator(PulseSpec{0.0, gap, detuning, 0.0});
}

}  // namespace

SpinState apply_pulse(const SpinState& state, const PulseSpec& pulse) {
  return SpinState::from_normalized(rotate_drive(state.amplitudes(), pulse_propagator(pulse)));
}

SpinState free_evolution(const SpinState& state, double gap, double detuning) {
  if (!(gap >= 0.0)) throw std::invalid_argument("free_evolution: gap must be >= 0");
  return SpinState::from_normalized(rotate_drive(state.amplitudes(), precession(gap, detuning)));
}

double phase_flip_probability(double duration, const NoiseParams& params) {
  if (!(duration >= 0.0)) throw std::invalid_argument("dephasing duration must be >= 0");
  return 0.5 * -std::expm1(-params.dephasing_rate * duration);
}

SpinState apply_dephasing(const SpinState& state, double duration, const NoiseParams& params, Rng& rng) {
  const double flip = phase_flip_probability(duration, params);
  if (flip == 0.0) return state;
  if (!rng.bernoulli(flip)) return state;
  Vector4c a = state.amplitudes();
  a[kUpper] = -a[kUpper];
  return SpinState::from_normalized(a);
}

SpinState drive_pulse(const SpinState& state, const PulseSpec& pulse, const NoiseParams& params, Rng& rng) {
  return apply_dephasing(apply_pulse(state, pulse), pulse.duration, params, rng);
}

// --- density engine --------------------------------------------------------

DensityMatrix dephase(const DensityMatrix& rho, double duration, const NoiseParams& params) {
  const double keep = 1.0 - 2.0 * phase_flip_probability(duration, params);
  if (keep == 1.0) return rho;
  Matrix4c m = rho.entries();
  for (int k = 0; k < 4; ++k) {
    if (k == kUpper) continue;
    m(k, kUpper) *= keep;
    m(kUpper, k) *= keep;
  }
  return DensityMatrix::from_trusted(m);
}

DensityMatrix evolve_density(const DensityMatrix& rho, const PulseSpec& pulse, const NoiseParams& params) {
  const Matrix4c u = embed_drive(pulse_propagator(pulse));
  const DensityMatrix rotated = DensityMatrix::from_trusted(u * rho.entries() * u.adjoint());
  return dephase(rotated, pulse.duration, params);
}

DensityMatrix free_evolution(const DensityMatrix& rho, double gap, double detuning) {
  if (!(gap >= 0.0)) throw std::invalid_argument("free_evolution: gap must be >= 0");
  const Matrix4c u = embed_drive(precession(gap, detuning));
  return DensityMatrix::from_trusted(u * rho.entries() * u.adjoint());
}

}  // namespace zeno
