#include "qsync/lindblad.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace qsync::lindblad {

namespace {

using qdyn::Axis;
using qdyn::Complex;
using qdyn::ComplexMatrix;

ComplexMatrix site_op(Axis axis, int site) { return qdyn::embed(qdyn::pauli(axis), site, 2); }

dyn::Mat16 commutator(const ComplexMatrix& h) {
  const ComplexMatrix id = qdyn::identity(4);
  return dyn::sandwich(h, id) - dyn::sandwich(id, h);
}

// jump-type term: rate (A rho B - 1/2 {B A, rho})
dyn::Mat16 dissipator_term(double rate, const ComplexMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix id = qdyn::identity(4);
  const ComplexMatrix ba = b * a;
  return rate * (dyn::sandwich(a, b) - 0.5 * (dyn::sandwich(ba, id) + dyn::sandwich(id, ba)));
}

}  // namespace

void MeConfig::validate() const {
  if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(f12)) {
    throw std::invalid_argument("me config: non-finite frequency or coupling");
  }
  if (!(a12 >= 0.0 && a12 <= 1.0)) throw std::invalid_argument("me config: a12 must lie in [0, 1]");
  if (!(n_bar >= 0.0)) throw std::invalid_argument("me config: n_bar must be non-negative");
  if (!(g > 0.0)) throw std::invalid_argument("me config: g must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("me config: t_max must be positive");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("me config: sample_dt must be positive");
  const double ratio = t_max / sample_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("me config: t_max must be an integer multiple of sample_dt");
  }
}

std::size_t MeConfig::n_steps() const { return static_cast<std::size_t>(std::llround(t_max / sample_dt)); }

ComplexMatrix Superoperator::apply(const ComplexMatrix& rho) const {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("Superoperator::apply: expected 4x4");
  dyn::Vec16 v;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) v(a + 4 * b) = rho(a, b);
  return dyn::unvectorize(m_ * v);
}

Superoperator liouvillian(const MeConfig& cfg) {
  cfg.validate();
  const ComplexMatrix lower[2] = {site_op(Axis::Minus, 0), site_op(Axis::Minus, 1)};
  const ComplexMatrix raise[2] = {site_op(Axis::Plus, 0), site_op(Axis::Plus, 1)};

  const ComplexMatrix h_s = cfg.omega1 * site_op(Axis::Z, 0) + cfg.omega2 * site_op(Axis::Z, 1);
  const ComplexMatrix h_d = cfg.f12 * (raise[0] * lower[1] + raise[1] * lower[0]);

  const double gamma[2] = {std::pow(cfg.omega1, 3) * cfg.g, std::pow(cfg.omega2, 3) * cfg.g};
  const double cross = std::sqrt(gamma[0] * gamma[1]) * cfg.a12;
  const double rates[2][2] = {{gamma[0], cross}, {cross, gamma[1]}};

  dyn::Mat16 l = Complex{0.0, -1.0} * commutator(h_s + h_d);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      // emission: sigma-_j rho sigma+_i - 1/2 {sigma+_i sigma-_j, rho}
      l += dissipator_term(rates[i][j] * (cfg.n_bar + 1.0), lower[j], raise[i]);
      // absorption: sigma+_j rho sigma-_i - 1/2 {sigma-_i sigma+_j, rho}
      if (cfg.n_bar > 0.0) l += dissipator_term(rates[i][j] * cfg.n_bar, raise[j], lower[i]);
    }
  }
  return Superoperator(l);
}

dyn::StepMap propagator(const Superoperator& l, double dt, int substeps) {
  if (substeps < 1) throw std::invalid_argument("propagator: substeps must be >= 1");
  const dyn::Mat16 scaled = l.matrix() * Complex{dt / substeps, 0.0};
  const dyn::Mat16 sub = scaled.exp();
  return dyn::StepMap(sub).power(static_cast<std::uint64_t>(substeps));
}

qdyn::ComplexVector ideal_qubit1() {
  qdyn::ComplexVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

qdyn::ComplexVector ideal_qubit2() {
  qdyn::ComplexVector v(2);
  v << 1.0 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0), -std::numbers::pi / 3.0);
  return v;
}

qdyn::DensityMatrix ideal_initial_state() {
  return qdyn::DensityMatrix::pure(qdyn::kron(ideal_qubit1(), ideal_qubit2()));
}

Trajectory propagate(const qdyn::DensityMatrix& rho0, const MeConfig& cfg) {
  cfg.validate();
  if (rho0.dim() != 4) throw std::invalid_argument("propagate: expected a two-qubit state");
  const dyn::StepMap step = propagator(liouvillian(cfg), cfg.sample_dt);
  const dyn::Vec16 v0 = dyn::vectorize(rho0);

  Trajectory traj = dyn::run_all(step, v0, cfg.n_steps(), Model::Me, cfg.sample_dt);
  const dyn::Readout r0 = dyn::readout(v0);
  traj.index.insert(traj.index.begin(), 0.0);
  traj.sx1.insert(traj.sx1.begin(), r0.sx1);
  traj.sx2.insert(traj.sx2.begin(), r0.sx2);
  return traj;
}

}  // namespace qsync::lindblad
