#pragma once

// Finite direct sums of full matrix algebras M_{n_1} ⊕ ... ⊕ M_{n_m}, their
// elements, positive functionals given by density elements, and projections.

#include <span>
#include <vector>

#include "kmslab/error.hpp"
#include "kmslab/linalg.hpp"

namespace kmslab {

class BlockAlgebra {
 public:
  explicit BlockAlgebra(std::vector<int> block_dims);

  std::span<const int> block_dims() const { return dims_; }
  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int block_dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }

  // N = Σ n_i², the length of a flattened coordinate vector.
  int total_dimension() const { return total_; }
  // Σ n_i, the size of the defining representation.
  int representation_dimension() const { return rep_dim_; }
  // Offset of block i inside a flattened coordinate vector.
  int flat_offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }

  bool is_abelian() const;
  bool operator==(const BlockAlgebra& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
  int rep_dim_ = 0;
};

class AlgElement {
 public:
  AlgElement(BlockAlgebra algebra, std::vector<Matrix> blocks);

  static AlgElement zero(const BlockAlgebra& a);
  static AlgElement identity(const BlockAlgebra& a);
  static AlgElement matrix_unit(const BlockAlgebra& a, int block, int row, int col);
  // Block-scalar element Σ c_i 1_i.
  static AlgElement central(const BlockAlgebra& a, std::span<const Complex> coefficients);
  // Inverse of flatten(): row-major blocks, concatenated.
  static AlgElement from_flat(const BlockAlgebra& a, const Vector& coords);

  const BlockAlgebra& algebra() const { return algebra_; }
  const Matrix& block(int i) const { return blocks_.at(static_cast<std::size_t>(i)); }
  Matrix& block(int i) { return blocks_.at(static_cast<std::size_t>(i)); }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  int num_blocks() const { return algebra_.num_blocks(); }

  AlgElement adjoint() const;
  Vector flatten() const;
  // Block-diagonal matrix on C^{Σ n_i}.
  Matrix to_dense() const;

  AlgElement& operator+=(const AlgElement& o);
  AlgElement& operator-=(const AlgElement& o);
  AlgElement& operator*=(Complex s);

  double operator_norm() const;
  double frobenius_norm() const;
  double max_abs() const;
  double hermiticity_defect() const;
  bool is_hermitian(double tol = kDefaultTol) const { return hermiticity_defect() <= tol; }
  bool is_central(double tol = kDefaultTol) const;

  // Σ_i Tr(block_i)
  Complex trace() const;

 private:
  BlockAlgebra algebra_;
  std::vector<Matrix> blocks_;
};

AlgElement operator+(AlgElement a, const AlgElement& b);
AlgElement operator-(AlgElement a, const AlgElement& b);
AlgElement operator*(const AlgElement& a, const AlgElement& b);
AlgElement operator*(Complex s, AlgElement a);
AlgElement commutator(const AlgElement& a, const AlgElement& b);

void require_same_algebra(const BlockAlgebra& a, const BlockAlgebra& b);

// Minimum eigenvalue over all blocks; the element must be self-adjoint.
double min_eigenvalue(const AlgElement& a, double tol = kDefaultTol);

// Throws "not self-adjoint" for non-Hermitian input.
bool is_positive(const AlgElement& a, double tol = kDefaultTol);

// Applies f to the spectrum of a Hermitian element, block by block.
template <class F>
AlgElement functional_calculus(const AlgElement& a, F&& f) {
  std::vector<Matrix> out;
  out.reserve(a.blocks().size());
  for (const Matrix& b : a.blocks()) out.push_back(hermitian_eigen(b).apply(f));
  return AlgElement(a.algebra(), std::move(out));
}

// Positive linear functional a ↦ Σ_i Tr(d_i a_i).
class Functional {
 public:
  // Throws when the density is not positive semidefinite.
  explicit Functional(AlgElement density, double tol = kDefaultTol);

  const BlockAlgebra& algebra() const { return density_.algebra(); }
  const AlgElement& density() const { return density_; }

  Complex operator()(const AlgElement& a) const;
  double mass() const;  // φ(1)
  std::vector<double> block_masses() const;
  bool is_state(double tol = kDefaultTol) const;
  bool is_faithful(double tol = kDefaultTol) const;
  Functional normalized() const;
  Functional scaled(double s) const;

 private:
  AlgElement density_;
};

// The normalized trace Σ Tr(a_i) / Σ n_i.
Functional tracial_state(const BlockAlgebra& a);

bool is_trace(const Functional& phi, double tol = kDefaultTol);

class Projection {
 public:
  // Throws unless p = p* = p² to tolerance.
  explicit Projection(AlgElement p, double tol = kDefaultTol);
  const AlgElement& element() const { return p_; }
  const BlockAlgebra& algebra() const { return p_.algebra(); }
  std::vector<int> block_ranks() const;
  bool is_full() const;  // nonzero in every block

 private:
  AlgElement p_;
};

std::vector<Projection> center_projections(const BlockAlgebra& a);

// Orthonormal basis (Hilbert-Schmidt) of {x ∈ M_dim : xs = sx ∀ s ∈ S}.
std::vector<Matrix> commutant_basis(std::span<const Matrix> generators, int dim,
                                    double tol = kDefaultTol);

}  // namespace kmslab
