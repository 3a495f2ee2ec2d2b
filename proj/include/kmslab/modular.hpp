#pragma once

// GNS representations of states on finite-dimensional algebras, the modular
// operator and conjugation obtained from the polar decomposition of
// S: Λ(a) ↦ Λ(a*), and the associated structural checks.

#include <vector>

#include "kmslab/kms.hpp"

namespace kmslab {

// Coordinates are taken in an orthonormal basis q_k = Λ(t_k) of the GNS space,
// with t_k = Σ_m T(m,k) E_m over the matrix units E_m (flatten() order).
struct GnsTriple {
  BlockAlgebra algebra;
  Functional omega;
  int hilbert_dim = 0;
  Matrix basis_change;  // T: N_A × hilbert_dim
  Matrix coordinates;   // R = T* G: Λ(a) = R·vec(a)

  Vector lambda(const AlgElement& a) const;
  Matrix rep(const AlgElement& a) const;  // π(a) in the orthonormal basis
};

// Requires ω faithful; throws "density not strictly positive" otherwise.
GnsTriple gns(const Functional& omega);
// Any nonzero positive functional; the GNS space is A / N_ω.
GnsTriple gns_cyclic(const Functional& omega);

// Matrices of left/right multiplication and of the adjoint permutation on
// flatten() coordinates: vec(ab) = L_a vec(b), vec(ba) = R_a vec(b),
// vec(a*) = C conj(vec(a)).
Matrix left_multiplication(const AlgElement& a);
Matrix right_multiplication(const AlgElement& a);
Matrix adjoint_permutation(const BlockAlgebra& a);

struct ModularData {
  Matrix delta;            // Δ, complex-linear on the GNS space
  RealVector spectrum;     // eigenvalues of Δ, ascending
  Matrix conjugation;      // K with J(x) = K·conj(x)
  RealMatrix delta_real;   // Δ on the realified space
  RealMatrix j_real;       // J on the realified space
  Matrix s_operator;       // K_S with S(x) = K_S·conj(x)
};

ModularData modular_data(const GnsTriple& g);

// Δ = L_ρ R_{ρ^{-1}} and J(x) = x* in the coordinates x = aρ^{1/2},
// transported to the GNS basis of g.
ModularData modular_oracle(const GnsTriple& g);

struct ModularComparison {
  double delta_residual = 0.0;
  double conjugation_residual = 0.0;
};
ModularComparison compare_with_oracle(const ModularData& m, const ModularData& oracle);

// Residuals of the structural identities J² = 1, JΔJ = Δ^{-1}, SΛ(a) = Λ(a*).
struct ModularIdentities {
  double j_involution = 0.0;
  double j_symmetric = 0.0;
  double j_delta_j = 0.0;
  double s_on_lambda = 0.0;
};
ModularIdentities check_modular_identities(const GnsTriple& g, const ModularData& m);

inline constexpr double kModularFlowTimes[] = {-2.7, -1.0, -0.3, 0.3, 1.0, 2.7};

// Δ^{it}π(a)Δ^{-it} against π(σ_{-βt}(a)) over matrix units. The second form
// uses the given β for the flow side instead of ψ's own.
KmsVerdict verify_modular_flow(const InnerFlow& flow, const KmsState& psi, double tol = kDefaultTol);
KmsVerdict verify_modular_flow(const InnerFlow& flow, const KmsState& psi, double beta,
                               double tol);

struct CommutantReport {
  bool holds = false;
  int commutant_dimension = 0;
  int algebra_dimension = 0;
  double subspace_distance = 0.0;
};

// J π(A)' J = span π(A).
CommutantReport verify_commutant_theorem(const GnsTriple& g, const ModularData& m,
                                         double tol = 1e-8);

// dim of the center of π(A)''.
int center_dimension(const GnsTriple& g);

// A unitary v with v q v* = p, built from x = qp + (1-q)(1-p), v = (x*x)^{-1/2}x*.
AlgElement intertwining_unitary(const Projection& p, const Projection& q);

}  // namespace kmslab
