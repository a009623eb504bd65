#include "qsync/dynamics.hpp"

#include <cmath>
#include <string>

namespace qsync {

void validate(const Trajectory& traj) {
  if (traj.sx1.size() != traj.sx2.size() || traj.sx1.size() != traj.index.size()) {
    throw NumericalError("trajectory series have unequal lengths");
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!(std::abs(traj.sx1[i]) <= dyn::kValueBound) || !(std::abs(traj.sx2[i]) <= dyn::kValueBound)) {
      throw NumericalError("trajectory value out of physical range at sample " + std::to_string(i));
    }
  }
}

namespace dyn {

namespace {

using qdyn::Complex;

struct ReadoutWeights {
  Eigen::Matrix<Complex, 1, 16> sx1;
  Eigen::Matrix<Complex, 1, 16> sx2;
  Eigen::Matrix<Complex, 1, 16> trace;
};

// Tr[rho O] = sum_ab rho_ab O_ba, and rho_ab sits at vec index a + 4b.
Eigen::Matrix<Complex, 1, 16> weights_for(const qdyn::ComplexMatrix& op) {
  Eigen::Matrix<Complex, 1, 16> w;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) w(a + 4 * b) = op(b, a);
  return w;
}

const ReadoutWeights& readout_weights() {
  static const ReadoutWeights w{
      weights_for(qdyn::embed(qdyn::pauli(qdyn::Axis::X), 0, 2)),
      weights_for(qdyn::embed(qdyn::pauli(qdyn::Axis::X), 1, 2)),
      weights_for(qdyn::identity(4)),
  };
  return w;
}

void check_sample(const Readout& r, std::size_t step) {
  if (!(std::abs(r.trace - Complex{1.0, 0.0}) <= kSampleTraceTol)) {
    throw NumericalError("trace drift " + std::to_string(std::abs(r.trace - Complex{1.0, 0.0})) + " at step " +
                         std::to_string(step));
  }
  if (!(std::abs(r.sx1) <= kValueBound) || !(std::abs(r.sx2) <= kValueBound)) {
    throw NumericalError("expectation value out of range at step " + std::to_string(step));
  }
}

}  // namespace

Vec16 vectorize(const qdyn::DensityMatrix& rho) {
  if (rho.dim() != 4) throw std::invalid_argument("vectorize: expected a two-qubit state");
  Vec16 v;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) v(a + 4 * b) = rho(a, b);
  return v;
}

qdyn::ComplexMatrix unvectorize(const Vec16& v) {
  qdyn::ComplexMatrix m(4, 4);
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) m(a, b) = v(a + 4 * b);
  return m;
}

Mat16 sandwich(const qdyn::ComplexMatrix& left, const qdyn::ComplexMatrix& right) {
  if (left.rows() != 4 || left.cols() != 4 || right.rows() != 4 || right.cols() != 4) {
    throw std::invalid_argument("sandwich: expected 4x4 operators");
  }
  return qdyn::kron(right.transpose(), left);
}

Readout readout(const Vec16& v) {
  const auto& w = readout_weights();
  return Readout{(w.sx1 * v)(0).real(), (w.sx2 * v)(0).real(), (w.trace * v)(0)};
}

StepMap StepMap::power(std::uint64_t n) const {
  Mat16 result = Mat16::Identity();
  Mat16 base = m_;
  while (n > 0) {
    if (n & 1U) result = (base * result).eval();
    n >>= 1U;
    if (n > 0) base = (base * base).eval();
  }
  return StepMap(result);
}

Trajectory run_all(const StepMap& step, const Vec16& v0, std::size_t n_steps, Model model, double index_scale) {
  Trajectory traj;
  traj.model = model;
  traj.index.reserve(n_steps);
  traj.sx1.reserve(n_steps);
  traj.sx2.reserve(n_steps);
  Vec16 v = v0;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    v = step.apply(v);
    const Readout r = readout(v);
    check_sample(r, n);
    traj.index.push_back(static_cast<double>(n) * index_scale);
    traj.sx1.push_back(r.sx1);
    traj.sx2.push_back(r.sx2);
  }
  return traj;
}

WindowSamples run_windows(const StepMap& step, const Vec16& v0, std::size_t n_steps, std::size_t head,
                          std::size_t tail) {
  if (head > n_steps || tail > n_steps) {
    throw std::invalid_argument("run_windows: window longer than the run");
  }
  WindowSamples out;
  out.head_sx1.reserve(head);
  out.head_sx2.reserve(head);
  out.tail_sx1.reserve(tail);
  out.tail_sx2.reserve(tail);

  const std::size_t tail_start = n_steps - tail + 1;
  Vec16 v = v0;
  std::size_t n = 0;
  auto advance = [&](bool record_head, bool record_tail) {
    v = step.apply(v);
    ++n;
    const Readout r = readout(v);
    check_sample(r, n);
    if (record_head) {
      out.head_sx1.push_back(r.sx1);
      out.head_sx2.push_back(r.sx2);
    }
    if (record_tail) {
      out.tail_sx1.push_back(r.sx1);
      out.tail_sx2.push_back(r.sx2);
    }
  };

  while (n < head) advance(true, n + 1 >= tail_start);
  if (n + 1 < tail_start) {
    const std::size_t gap = tail_start - 1 - n;
    v = step.power(gap).apply(v);
    n += gap;
  }
  while (n < n_steps) advance(false, true);
  return out;
}

}  // namespace dyn
}  // namespace qsync
