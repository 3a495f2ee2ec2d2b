#include "kmslab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace kmslab {

HermitianEigen hermitian_eigen(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  return hermitian_eigen(hermitian).values(0);
}

Matrix nullspace(const Matrix& a, double tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  return psd_kernel(a.adjoint() * a, tol);
}

Matrix psd_kernel(const Matrix& gram, double tol) {
  const Eigen::Index n = gram.cols();
  const HermitianEigen eig = hermitian_eigen(gram);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (eig.values(i) <= tol * scale) keep.push_back(i);
  Matrix basis(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    basis.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(keep[c]);
  return basis;
}

Matrix orthonormal_span(const Matrix& columns, double tol) {
  const Eigen::Index n = columns.rows();
  if (columns.cols() == 0) return Matrix(n, 0);
  const HermitianEigen eig = hermitian_eigen(columns * columns.adjoint());
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (eig.values(i) > tol * scale) keep.push_back(i);
  Matrix basis(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    basis.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(keep[c]);
  return basis;
}

double subspace_distance(const Matrix& q1, const Matrix& q2) {
  const Matrix p1 = q1 * q1.adjoint();
  const Matrix p2 = q2 * q2.adjoint();
  return operator_norm(p1 - p2);
}

RealMatrix realify(const Matrix& m) {
  const Eigen::Index r = m.rows(), c = m.cols();
  RealMatrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = m.real();
  out.topRightCorner(r, c) = -m.imag();
  out.bottomLeftCorner(r, c) = m.imag();
  out.bottomRightCorner(r, c) = m.real();
  return out;
}

Matrix complexify(const RealMatrix& r) {
  const Eigen::Index rows = r.rows() / 2, cols = r.cols() / 2;
  Matrix out(rows, cols);
  out.real() = r.topLeftCorner(rows, cols);
  out.imag() = r.bottomLeftCorner(rows, cols);
  return out;
}

RealMatrix conjugation_real(Eigen::Index n) {
  RealMatrix c = RealMatrix::Identity(2 * n, 2 * n);
  c.bottomRightCorner(n, n) *= -1.0;
  return c;
}

}  // namespace kmslab
