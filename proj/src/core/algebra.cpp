#include "kmslab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace kmslab {

BlockAlgebra::BlockAlgebra(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  require(!dims_.empty(), ErrorCode::invalid_argument, "algebra needs at least one block");
  for (int n : dims_) {
    require(n >= 1, ErrorCode::invalid_argument, "block dimensions must be positive");
    offsets_.push_back(total_);
    total_ += n * n;
    rep_dim_ += n;
  }
}

bool BlockAlgebra::is_abelian() const {
  return std::all_of(dims_.begin(), dims_.end(), [](int n) { return n == 1; });
}

void require_same_algebra(const BlockAlgebra& a, const BlockAlgebra& b) {
  require(a == b, ErrorCode::invalid_argument, "algebra mismatch");
}

AlgElement::AlgElement(BlockAlgebra algebra, std::vector<Matrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  require(static_cast<int>(blocks_.size()) == algebra_.num_blocks(), ErrorCode::invalid_argument,
          "element has wrong number of blocks");
  for (int i = 0; i < algebra_.num_blocks(); ++i) {
    const int n = algebra_.block_dim(i);
    require(blocks_[i].rows() == n && blocks_[i].cols() == n, ErrorCode::invalid_argument,
            "block shape does not match algebra");
  }
}

AlgElement AlgElement::zero(const BlockAlgebra& a) {
  std::vector<Matrix> b;
  for (int n : a.block_dims()) b.push_back(Matrix::Zero(n, n));
  return AlgElement(a, std::move(b));
}

AlgElement AlgElement::identity(const BlockAlgebra& a) {
  std::vector<Matrix> b;
  for (int n : a.block_dims()) b.push_back(Matrix::Identity(n, n));
  return AlgElement(a, std::move(b));
}

AlgElement AlgElement::matrix_unit(const BlockAlgebra& a, int block, int row, int col) {
  AlgElement e = zero(a);
  require(block >= 0 && block < a.num_blocks(), ErrorCode::invalid_argument, "block index out of range");
  const int n = a.block_dim(block);
  require(row >= 0 && row < n && col >= 0 && col < n, ErrorCode::invalid_argument,
          "matrix unit index out of range");
  e.block(block)(row, col) = 1.0;
  return e;
}

AlgElement AlgElement::central(const BlockAlgebra& a, std::span<const Complex> coefficients) {
  require(static_cast<int>(coefficients.size()) == a.num_blocks(), ErrorCode::invalid_argument,
          "one central coefficient per block");
  AlgElement e = identity(a);
  for (int i = 0; i < a.num_blocks(); ++i) e.block(i) *= coefficients[static_cast<std::size_t>(i)];
  return e;
}

AlgElement AlgElement::from_flat(const BlockAlgebra& a, const Vector& coords) {
  require(coords.size() == a.total_dimension(), ErrorCode::invalid_argument,
          "coordinate vector has wrong length");
  AlgElement e = zero(a);
  for (int b = 0; b < a.num_blocks(); ++b) {
    const int n = a.block_dim(b);
    const int off = a.flat_offset(b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e.block(b)(i, j) = coords(off + i * n + j);
  }
  return e;
}

AlgElement AlgElement::adjoint() const {
  std::vector<Matrix> b;
  for (const Matrix& m : blocks_) b.push_back(m.adjoint());
  return AlgElement(algebra_, std::move(b));
}

Vector AlgElement::flatten() const {
  Vector v(algebra_.total_dimension());
  for (int b = 0; b < algebra_.num_blocks(); ++b) {
    const int n = algebra_.block_dim(b);
    const int off = algebra_.flat_offset(b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(off + i * n + j) = blocks_[b](i, j);
  }
  return v;
}

Matrix AlgElement::to_dense() const {
  const int d = algebra_.representation_dimension();
  Matrix m = Matrix::Zero(d, d);
  int off = 0;
  for (const Matrix& b : blocks_) {
    m.block(off, off, b.rows(), b.cols()) = b;
    off += static_cast<int>(b.rows());
  }
  return m;
}

AlgElement& AlgElement::operator+=(const AlgElement& o) {
  require_same_algebra(algebra_, o.algebra_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
  return *this;
}

AlgElement& AlgElement::operator-=(const AlgElement& o) {
  require_same_algebra(algebra_, o.algebra_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
  return *this;
}

AlgElement& AlgElement::operator*=(Complex s) {
  for (Matrix& m : blocks_) m *= s;
  return *this;
}

double AlgElement::operator_norm() const {
  double n = 0.0;
  for (const Matrix& m : blocks_) n = std::max(n, kmslab::operator_norm(m));
  return n;
}

double AlgElement::frobenius_norm() const {
  double s = 0.0;
  for (const Matrix& m : blocks_) s += m.squaredNorm();
  return std::sqrt(s);
}

double AlgElement::max_abs() const {
  double s = 0.0;
  for (const Matrix& m : blocks_) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

double AlgElement::hermiticity_defect() const {
  double d = 0.0;
  for (const Matrix& m : blocks_) d = std::max(d, kmslab::hermiticity_defect(m));
  return d;
}

bool AlgElement::is_central(double tol) const {
  for (const Matrix& m : blocks_) {
    const Complex c = m.trace() / static_cast<double>(m.rows());
    const Matrix diff = m - c * Matrix::Identity(m.rows(), m.cols());
    if (diff.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

Complex AlgElement::trace() const {
  Complex t = 0.0;
  for (const Matrix& m : blocks_) t += m.trace();
  return t;
}

AlgElement operator+(AlgElement a, const AlgElement& b) { return a += b; }
AlgElement operator-(AlgElement a, const AlgElement& b) { return a -= b; }

AlgElement operator*(const AlgElement& a, const AlgElement& b) {
  require_same_algebra(a.algebra(), b.algebra());
  std::vector<Matrix> out;
  for (int i = 0; i < a.num_blocks(); ++i) out.push_back(a.block(i) * b.block(i));
  return AlgElement(a.algebra(), std::move(out));
}

AlgElement operator*(Complex s, AlgElement a) { return a *= s; }

AlgElement commutator(const AlgElement& a, const AlgElement& b) { return a * b - b * a; }

double min_eigenvalue(const AlgElement& a, double tol) {
  require(a.is_hermitian(tol), ErrorCode::domain, "not self-adjoint");
  double m = std::numeric_limits<double>::infinity();
  for (const Matrix& b : a.blocks()) m = std::min(m, kmslab::min_eigenvalue(b));
  return m;
}

bool is_positive(const AlgElement& a, double tol) { return min_eigenvalue(a, tol) >= -tol; }

// ---------------------------------------------------------------------------

Functional::Functional(AlgElement density, double tol) : density_(std::move(density)) {
  require(density_.is_hermitian(tol), ErrorCode::domain, "density not self-adjoint");
  const double scale = std::max(1.0, density_.max_abs());
  require(min_eigenvalue(density_, tol * scale) >= -tol * scale, ErrorCode::domain,
          "density not positive semidefinite");
}

Complex Functional::operator()(const AlgElement& a) const {
  require_same_algebra(algebra(), a.algebra());
  Complex v = 0.0;
  for (int i = 0; i < a.num_blocks(); ++i)
    v += (density_.block(i).transpose().cwiseProduct(a.block(i))).sum();
  return v;
}

double Functional::mass() const { return density_.trace().real(); }

std::vector<double> Functional::block_masses() const {
  std::vector<double> m;
  for (const Matrix& b : density_.blocks()) m.push_back(b.trace().real());
  return m;
}

bool Functional::is_state(double tol) const { return std::abs(mass() - 1.0) <= tol; }

bool Functional::is_faithful(double tol) const { return min_eigenvalue(density_) > tol; }

Functional Functional::normalized() const {
  const double m = mass();
  require(m > 0.0, ErrorCode::domain, "cannot normalize the zero functional");
  return scaled(1.0 / m);
}

Functional Functional::scaled(double s) const {
  require(s >= 0.0, ErrorCode::domain, "negative scaling of a positive functional");
  return Functional(Complex(s) * density_);
}

Functional tracial_state(const BlockAlgebra& a) {
  return Functional(Complex(1.0 / a.representation_dimension()) * AlgElement::identity(a));
}

bool is_trace(const Functional& phi, double tol) {
  // φ(e_ij e_kl) - φ(e_kl e_ij) = δ_jk d_li - δ_li d_jk
  for (const Matrix& d : phi.density().blocks()) {
    const Eigen::Index n = d.rows();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
          for (Eigen::Index l = 0; l < n; ++l) {
            const Complex lhs = (j == k) ? d(l, i) : Complex(0.0);
            const Complex rhs = (l == i) ? d(j, k) : Complex(0.0);
            if (std::abs(lhs - rhs) > tol) return false;
          }
  }
  return true;
}

// ---------------------------------------------------------------------------

Projection::Projection(AlgElement p, double tol) : p_(std::move(p)) {
  require(p_.is_hermitian(tol), ErrorCode::domain, "projection not self-adjoint");
  require((p_ * p_ - p_).max_abs() <= tol, ErrorCode::domain, "projection not idempotent");
}

std::vector<int> Projection::block_ranks() const {
  std::vector<int> r;
  for (const Matrix& b : p_.blocks()) r.push_back(static_cast<int>(std::lround(b.trace().real())));
  return r;
}

bool Projection::is_full() const {
  const auto r = block_ranks();
  return std::all_of(r.begin(), r.end(), [](int k) { return k > 0; });
}

std::vector<Projection> center_projections(const BlockAlgebra& a) {
  std::vector<Projection> out;
  for (int i = 0; i < a.num_blocks(); ++i) {
    AlgElement e = AlgElement::zero(a);
    e.block(i).setIdentity();
    out.emplace_back(std::move(e));
  }
  return out;
}

std::vector<Matrix> commutant_basis(std::span<const Matrix> generators, int dim, double tol) {
  const Eigen::Index n = dim;
  const Eigen::Index n2 = n * n;
  // Column-major vec: vec(xs) = (s^T ⊗ I) vec(x), vec(sx) = (I ⊗ s) vec(x).
  Matrix gram = Matrix::Zero(n2, n2);
  for (const Matrix& s : generators) {
    require(s.rows() == n && s.cols() == n, ErrorCode::invalid_argument,
            "commutant generators must act on the same space");
    Matrix op = Matrix::Zero(n2, n2);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        // block (a,b) of s^T ⊗ I is s(b,a) I; of I ⊗ s is δ_ab s
        for (Eigen::Index i = 0; i < n; ++i) op(a * n + i, b * n + i) += s(b, a);
        if (a == b) op.block(a * n, b * n, n, n) -= s;
      }
    gram += op.adjoint() * op;
  }
  const Matrix kernel = psd_kernel(gram, tol);
  std::vector<Matrix> out;
  for (Eigen::Index c = 0; c < kernel.cols(); ++c)
    out.push_back(Eigen::Map<const Matrix>(kernel.col(c).data(), n, n));
  return out;
}

}  // namespace kmslab
