#include "qsync/qdyn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qsync/common.hpp"

namespace qsync::qdyn {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
}

}  // namespace

ComplexMatrix pauli(Axis axis) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  const Complex i{0.0, 1.0};
  switch (axis) {
    case Axis::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::Y:
      m(0, 1) = -i;
      m(1, 0) = i;
      break;
    case Axis::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Axis::Plus:  // |1><0|
      m(1, 0) = 1.0;
      break;
    case Axis::Minus:  // |0><1|
      m(0, 1) = 1.0;
      break;
  }
  return m;
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, int site, int n_qubits) {
  if (op.rows() != 2 || op.cols() != 2) {
    throw std::invalid_argument("embed: operator must be 2x2");
  }
  if (n_qubits < 1 || site < 0 || site >= n_qubits) {
    throw std::invalid_argument("embed: site " + std::to_string(site) + " out of range for " +
                                std::to_string(n_qubits) + " qubits");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int s = 0; s < n_qubits; ++s) {
    out = kron(out, s == site ? op : identity(2));
  }
  return out;
}

double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) { return hermiticity_error(m) <= tol; }

double min_eigenvalue(const ComplexMatrix& m) {
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NumericalError("density matrix must be square and non-empty");
  }
  const double herm = hermiticity_error(m);
  if (!(herm <= kHermitianTol)) {
    throw NumericalError("density matrix not Hermitian (deviation " + std::to_string(herm) + ")");
  }
  const Complex tr = m.trace();
  if (!(std::abs(tr - Complex{1.0, 0.0}) <= kTraceTol)) {
    throw NumericalError("density matrix trace deviates from 1 (trace " + std::to_string(tr.real()) + ")");
  }
  const double lowest = min_eigenvalue(m);
  if (!(lowest >= -kPsdTol)) {
    throw NumericalError("density matrix not positive semidefinite (eigenvalue " + std::to_string(lowest) + ")");
  }
  ComplexMatrix herm_part = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(herm_part));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw std::invalid_argument("pure: state vector must be normalized");
  }
  return from_matrix(psi * psi.adjoint());
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from_matrix(kron(a.matrix(), b.matrix()));
}

double unitarity_error(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

UnitaryMatrix UnitaryMatrix::from_matrix(ComplexMatrix m) {
  require_square(m, "unitary");
  const double err = unitarity_error(m);
  if (!(err <= kUnitaryTol)) {
    throw NumericalError("matrix is not unitary (deviation " + std::to_string(err) + ")");
  }
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("unitary product: dimension mismatch");
  return UnitaryMatrix::from_matrix(a.m_ * b.m_);
}

UnitaryMatrix unitary_of(const ComplexMatrix& h, double t) {
  require_square(h, "unitary_of");
  if (!is_hermitian(h)) {
    throw std::invalid_argument("unitary_of: generator is not Hermitian");
  }
  const ComplexMatrix herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  const Eigen::VectorXd& w = solver.eigenvalues();
  ComplexVector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    phases(k) = std::exp(Complex{0.0, -w(k) * t});
  }
  const ComplexMatrix& v = solver.eigenvectors();
  return UnitaryMatrix::from_matrix(v * phases.asDiagonal() * v.adjoint());
}

DensityMatrix apply(const DensityMatrix& rho, const UnitaryMatrix& u) {
  if (rho.dim() != u.dim()) {
    throw std::invalid_argument("apply: state dimension " + std::to_string(rho.dim()) +
                                " does not match unitary dimension " + std::to_string(u.dim()));
  }
  return DensityMatrix::from_matrix(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Keep keep) {
  if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != rho.dim()) {
    throw std::invalid_argument("partial_trace: dimension " + std::to_string(rho.dim()) + " does not factor as " +
                                std::to_string(dim_a) + " x " + std::to_string(dim_b));
  }
  const ComplexMatrix& m = rho.matrix();
  if (keep == Keep::A) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return DensityMatrix::from_matrix(std::move(out));
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k) out(i, j) += m(k * dim_b + i, k * dim_b + j);
  return DensityMatrix::from_matrix(std::move(out));
}

double expect(const DensityMatrix& rho, const ComplexMatrix& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw std::invalid_argument("expect: operator dimension does not match state");
  }
  if (!is_hermitian(op)) {
    throw std::invalid_argument("expect: observable is not Hermitian");
  }
  const Complex value = (rho.matrix() * op).trace();
  if (std::abs(value.imag()) > kImagTol) {
    throw NumericalError("expect: imaginary part " + std::to_string(value.imag()) + " exceeds tolerance");
  }
  return value.real();
}

}  // namespace qsync::qdyn
