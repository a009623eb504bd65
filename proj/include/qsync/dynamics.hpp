#pragma once

// Linear propagation of two-qubit states in column-stacked (vec) form.
//
// Both collision cycles and the master-equation propagator are linear maps
// on the 16-dimensional vectorized density matrix; sweeps run through this
// layer so each grid point costs a handful of 16x16 products.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qsync/common.hpp"
#include "qsync/qdyn.hpp"

namespace qsync {

/// Paired <sigma^x_s1>, <sigma^x_s2> series. `index` holds the collision
/// number (collision models) or the sample time (master equation).
struct Trajectory {
  Model model = Model::Lcm;
  std::vector<double> index;
  std::vector<double> sx1;
  std::vector<double> sx2;

  std::size_t size() const noexcept { return sx1.size(); }
  bool empty() const noexcept { return sx1.empty(); }
};

/// Throws NumericalError if lengths differ or any |value| > 1 + 1e-8.
void validate(const Trajectory& traj);

namespace dyn {

using Vec16 = Eigen::Matrix<qdyn::Complex, 16, 1>;
using Mat16 = Eigen::Matrix<qdyn::Complex, 16, 16>;

inline constexpr double kSampleTraceTol = 1e-8;
inline constexpr double kValueBound = 1.0 + 1e-8;

Vec16 vectorize(const qdyn::DensityMatrix& rho);
qdyn::ComplexMatrix unvectorize(const Vec16& v);

/// vec(A X B) = (B^T kron A) vec(X).
Mat16 sandwich(const qdyn::ComplexMatrix& left, const qdyn::ComplexMatrix& right);

struct Readout {
  double sx1;
  double sx2;
  qdyn::Complex trace;
};

Readout readout(const Vec16& v);

/// One step of a time-homogeneous linear evolution.
class StepMap {
 public:
  StepMap() : m_(Mat16::Identity()) {}
  explicit StepMap(const Mat16& m) : m_(m) {}

  const Mat16& matrix() const noexcept { return m_; }
  Vec16 apply(const Vec16& v) const { return m_ * v; }

  /// The n-fold composition by binary powering.
  StepMap power(std::uint64_t n) const;

 private:
  Mat16 m_;
};

/// Observables after steps 1..n, in order.
Trajectory run_all(const StepMap& step, const Vec16& v0, std::size_t n_steps, Model model,
                   double index_scale = 1.0);

/// The first `head` and last `tail` post-initial samples of an n-step run.
/// The gap in between is bridged with a matrix power instead of stepping.
struct WindowSamples {
  std::vector<double> head_sx1;
  std::vector<double> head_sx2;
  std::vector<double> tail_sx1;
  std::vector<double> tail_sx2;
};

WindowSamples run_windows(const StepMap& step, const Vec16& v0, std::size_t n_steps, std::size_t head,
                          std::size_t tail);

}  // namespace dyn
}  // namespace qsync
