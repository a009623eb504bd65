#pragma once

// Dense complex linear algebra for 1-3 qubit registers.
//
// Basis ordering is (|0>, |1>) on every site with sigma^z = diag(1, -1).
// Multi-qubit operators place site 0 as the leftmost tensor factor.

#include <complex>

#include <Eigen/Dense>

namespace qsync::qdyn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kImagTol = 1e-10;

enum class Axis { X, Y, Z, Plus, Minus };

/// 2x2 Pauli or ladder operator; sigma^- = |0><1|, sigma^+ = |1><0|.
ComplexMatrix pauli(Axis axis);

ComplexMatrix identity(int dim);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Places a single-qubit operator on `site` of an n-qubit register.
/// Throws std::invalid_argument if site is out of range.
ComplexMatrix embed(const ComplexMatrix& op, int site, int n_qubits);

/// max_ij |m_ij - conj(m_ji)|; +inf for non-square input.
double hermiticity_error(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);

/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const ComplexMatrix& m);

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  /// Throws NumericalError when any invariant is violated.
  static DensityMatrix from_matrix(ComplexMatrix m);

  /// |psi><psi| for a normalized state vector.
  static DensityMatrix pure(const ComplexVector& psi);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  Complex operator()(int row, int col) const { return m_(row, col); }

  double purity() const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}

  ComplexMatrix m_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

class UnitaryMatrix {
 public:
  /// Throws NumericalError if ||U^dagger U - I||_max exceeds kUnitaryTol.
  static UnitaryMatrix from_matrix(ComplexMatrix m);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  /// Operator product: (a * b) applies b first.
  friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b);

 private:
  explicit UnitaryMatrix(ComplexMatrix m) : m_(std::move(m)) {}

  ComplexMatrix m_;
};

double unitarity_error(const ComplexMatrix& u);

/// exp(-i H t) by spectral decomposition. Throws std::invalid_argument if H
/// is not Hermitian within kHermitianTol.
UnitaryMatrix unitary_of(const ComplexMatrix& h, double t);

/// U rho U^dagger. Throws std::invalid_argument on dimension mismatch.
DensityMatrix apply(const DensityMatrix& rho, const UnitaryMatrix& u);

enum class Keep { A, B };

/// Reduced state of one side of a dim_a x dim_b bipartition.
DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Keep keep);

/// Tr[rho O]; throws NumericalError if the imaginary part exceeds kImagTol
/// and std::invalid_argument for a non-Hermitian O or mismatched dimensions.
double expect(const DensityMatrix& rho, const ComplexMatrix& op);

}  // namespace qsync::qdyn
