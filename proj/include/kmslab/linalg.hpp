#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace kmslab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Spectral data h = U diag(values) U* of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;

  // U f(diag) U*
  template <class F>
  Matrix apply(F&& f) const {
    Vector d(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) d(i) = f(values(i));
    return vectors * d.asDiagonal() * vectors.adjoint();
  }
};

// The single spectral primitive. The input is symmetrized before solving, so
// callers check hermiticity themselves where it matters.
HermitianEigen hermitian_eigen(const Matrix& m);

// max |m - m*| entrywise
double hermiticity_defect(const Matrix& m);

double operator_norm(const Matrix& m);

double min_eigenvalue(const Matrix& hermitian);

// Orthonormal basis (columns) of ker(A): eigenvectors of A*A with eigenvalue
// below tol * max eigenvalue (so singular values below sqrt(tol) relative).
Matrix nullspace(const Matrix& a, double tol);

// Kernel of a positive semidefinite matrix with the same relative cut.
Matrix psd_kernel(const Matrix& gram, double tol);

// Orthonormal basis of the column span; same relative cut as nullspace().
Matrix orthonormal_span(const Matrix& columns, double tol);

// Distance between the subspaces spanned by two orthonormal column sets:
// operator norm of the difference of their orthogonal projections.
double subspace_distance(const Matrix& q1, const Matrix& q2);

// Realification: x + iy  ->  [x; y].
RealMatrix realify(const Matrix& m);
Matrix complexify(const RealMatrix& r);  // inverse of realify on complex-linear blocks
RealMatrix conjugation_real(Eigen::Index n);

}  // namespace kmslab
