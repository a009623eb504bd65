#include "qsync/collision.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qsync::collision {

namespace {

using qdyn::Axis;
using qdyn::ComplexMatrix;
using qdyn::ComplexVector;
using qdyn::DensityMatrix;
using qdyn::UnitaryMatrix;

constexpr int kSites = 3;  // s1, s2, e
constexpr int kS1 = 0;
constexpr int kS2 = 1;
constexpr int kEnv = 2;

ComplexMatrix op(Axis axis, int site) { return qdyn::embed(qdyn::pauli(axis), site, kSites); }

// (coupling/2)(XX + YY) between two sites.
ComplexMatrix exchange(double coupling, int a, int b) {
  return 0.5 * coupling * (op(Axis::X, a) * op(Axis::X, b) + op(Axis::Y, a) * op(Axis::Y, b));
}

// (coupling/2) XX between two sites.
ComplexMatrix ising_xx(double coupling, int a, int b) { return 0.5 * coupling * (op(Axis::X, a) * op(Axis::X, b)); }

ComplexMatrix free_hamiltonian(const CollisionConfig& cfg) {
  return -0.5 * cfg.omega1 * op(Axis::Z, kS1) - 0.5 * cfg.omega2 * op(Axis::Z, kS2);
}

struct CycleSteps {
  std::vector<UnitaryMatrix> steps;  // applied front to back
};

CycleSteps lcm_steps(const CollisionConfig& cfg) {
  return {{qdyn::unitary_of(exchange(cfg.j, kS2, kEnv), cfg.dt_se),
           qdyn::unitary_of(exchange(cfg.lam, kS1, kS2), cfg.dt_ss),
           qdyn::unitary_of(free_hamiltonian(cfg), cfg.dt_s)}};
}

CycleSteps gcm_steps(const CollisionConfig& cfg) {
  return {{qdyn::unitary_of(exchange(cfg.j, kS1, kEnv), cfg.dt_se),
           qdyn::unitary_of(exchange(cfg.j, kS2, kEnv), cfg.dt_se),
           qdyn::unitary_of(ising_xx(cfg.lam, kS1, kS2), cfg.dt_ss),
           qdyn::unitary_of(free_hamiltonian(cfg), cfg.dt_s)}};
}

UnitaryMatrix compose(const CycleSteps& s) {
  UnitaryMatrix u = s.steps.front();
  for (std::size_t i = 1; i < s.steps.size(); ++i) u = s.steps[i] * u;
  return u;
}

DensityMatrix run_cycle(const DensityMatrix& rho_s, const CollisionConfig& cfg, const CycleSteps& s) {
  if (rho_s.dim() != 4) throw std::invalid_argument("collision cycle: expected a two-qubit state");
  DensityMatrix joint = qdyn::tensor(rho_s, env_state(cfg.env_p));
  for (const auto& u : s.steps) joint = qdyn::apply(joint, u);
  return qdyn::partial_trace(joint, 4, 2, qdyn::Keep::A);
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": probability " + std::to_string(p) + " outside [0, 1]");
  }
}

}  // namespace

void CollisionConfig::validate() const {
  if (!(omega2 >= 0.0)) throw std::invalid_argument("collision config: omega2 must be non-negative");
  if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(j) || !std::isfinite(lam)) {
    throw std::invalid_argument("collision config: non-finite coupling or frequency");
  }
  if (!(dt_s > 0.0 && dt_ss > 0.0 && dt_se > 0.0)) {
    throw std::invalid_argument("collision config: step durations must be positive");
  }
  if (n_collisions < 0) throw std::invalid_argument("collision config: n_collisions must be non-negative");
  if (!(env_p >= 0.0 && env_p <= 0.5)) {
    throw std::invalid_argument("collision config: env_p must lie in [0, 0.5]");
  }
}

DensityMatrix env_state(double p) {
  require_probability(p, "env_state");
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0 - p;
  m(1, 1) = p;
  return DensityMatrix::from_matrix(std::move(m));
}

ComplexVector plus_state() {
  ComplexVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

DensityMatrix error_mixture(const ComplexVector& a, const ComplexVector& b, double p, double split) {
  require_probability(p, "initial_state");
  require_probability(split, "initial_state branch split");
  const ComplexMatrix z = qdyn::pauli(Axis::Z);
  const ComplexVector ideal = qdyn::kron(a, b);
  const ComplexVector second_flipped = qdyn::kron(a, z * b);
  const ComplexVector first_flipped = qdyn::kron(z * a, b);
  ComplexMatrix m = p * ideal * ideal.adjoint() +
                    (1.0 - p) * (split * second_flipped * second_flipped.adjoint() +
                                 (1.0 - split) * first_flipped * first_flipped.adjoint());
  return DensityMatrix::from_matrix(std::move(m));
}

DensityMatrix initial_state(double p, double split) { return error_mixture(plus_state(), plus_state(), p, split); }

UnitaryMatrix lcm_cycle_unitary(const CollisionConfig& cfg) {
  cfg.validate();
  return compose(lcm_steps(cfg));
}

UnitaryMatrix gcm_cycle_unitary(const CollisionConfig& cfg) {
  cfg.validate();
  return compose(gcm_steps(cfg));
}

DensityMatrix lcm_cycle(const DensityMatrix& rho_s, const CollisionConfig& cfg) {
  cfg.validate();
  return run_cycle(rho_s, cfg, lcm_steps(cfg));
}

DensityMatrix gcm_cycle(const DensityMatrix& rho_s, const CollisionConfig& cfg) {
  cfg.validate();
  return run_cycle(rho_s, cfg, gcm_steps(cfg));
}

dyn::StepMap cycle_map(Model model, const CollisionConfig& cfg) {
  if (model == Model::Me) throw std::invalid_argument("cycle_map: not a collision model");
  const UnitaryMatrix u = model == Model::Lcm ? lcm_cycle_unitary(cfg) : gcm_cycle_unitary(cfg);
  const ComplexMatrix& m = u.matrix();
  const double env_weights[2] = {1.0 - cfg.env_p, cfg.env_p};

  dyn::Mat16 map = dyn::Mat16::Zero();
  for (int b = 0; b < 2; ++b) {
    if (env_weights[b] == 0.0) continue;
    const double amp = std::sqrt(env_weights[b]);
    for (int a = 0; a < 2; ++a) {
      ComplexMatrix kraus(4, 4);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) kraus(r, c) = amp * m(2 * r + a, 2 * c + b);
      map += dyn::sandwich(kraus, kraus.adjoint());
    }
  }
  return dyn::StepMap(map);
}

Trajectory simulate_collisions(Model model, const CollisionConfig& cfg, const DensityMatrix& rho0) {
  cfg.validate();
  if (rho0.dim() != 4) throw std::invalid_argument("simulate_collisions: expected a two-qubit state");
  Trajectory traj;
  traj.model = model;
  if (cfg.n_collisions == 0) return traj;
  return dyn::run_all(cycle_map(model, cfg), dyn::vectorize(rho0), static_cast<std::size_t>(cfg.n_collisions), model);
}

}  // namespace qsync::collision
