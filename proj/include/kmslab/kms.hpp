#pragma once

// β-KMS states of inner flows on finite-dimensional algebras: Gibbs states,
// verification of the KMS condition, the simplex of KMS states, the bijection
// with traces, corner restriction and extension, domination and the lattice
// structure of the KMS cone.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "kmslab/flow.hpp"

namespace kmslab {

// |β|·∥h∥ above this overflows e^{-βh}.
inline constexpr double kMaxBetaNorm = 700.0;

struct KmsState {
  Functional functional;
  double beta;
  InnerFlow flow;
};

struct KmsVerdict {
  bool passed = false;
  double max_residual = 0.0;         // condition ω(ab) = ω(bσ_{iβ}(a)) over matrix units
  double condition2_residual = 0.0;  // ω(a*a) = ω(σ_{-iβ/2}(a)σ_{-iβ/2}(a)*) on random a
  bool conditions_agree = true;
  // block, (i,j) of a = e_ij, (k,l) of b = e_kl; units of the eigenbasis of h
  std::array<int, 5> worst_pair{0, 0, 0, 0, 0};
};

KmsState gibbs(const InnerFlow& flow, double beta);

KmsVerdict verify_kms(const InnerFlow& flow, const Functional& omega, double beta,
                      double tol = kDefaultTol, std::uint64_t seed = 0, int random_samples = 100);

// Density e^{-βh}·1_i / Tr(e^{-βh}·1_i) for each block i.
struct KmsSimplex {
  double beta;
  std::vector<KmsState> vertices;

  int dimension() const { return static_cast<int>(vertices.size()) - 1; }
  // Σ c_i vertex_i for barycentric c (nonnegative, summing to 1).
  KmsState combination(std::span<const double> weights) const;
};

KmsSimplex kms_simplex(const InnerFlow& flow, double beta);

// Residual of the normal form: e^{βh/2} d e^{βh/2} should be central.
double normal_form_residual(const InnerFlow& flow, const Functional& omega, double beta);

// The trace τ with ψ = τ(e^{-βh/2} · e^{-βh/2}), normalized to a state.
Functional trace_of(const KmsState& psi);
// ψ_τ normalized to a state; τ must be a trace.
KmsState from_trace(const Functional& tau, const InnerFlow& flow, double beta);

// Identification of pAp with ⊕ M_{rank p_i} via isometries V_i onto range(p_i).
struct CornerEmbedding {
  BlockAlgebra corner;
  std::vector<Matrix> isometries;     // n_i × r_i
  std::vector<int> source_blocks;     // block of A that corner block j comes from

  AlgElement compress(const AlgElement& a) const;  // p a p as an element of the corner
};

// Throws "corner not flow-invariant" when [p,h] ≠ 0.
CornerEmbedding corner_embedding(const InnerFlow& flow, const Projection& p,
                                 double tol = kDefaultTol);

struct CornerRestriction {
  CornerEmbedding embedding;
  InnerFlow compressed_flow;  // generator php
  Functional state;           // ψ(p)^{-1} ψ|_{pAp}
  double normalization = 0;   // ψ(p)
  bool full = false;
};

CornerRestriction restrict_to_corner(const KmsState& psi, const Projection& p);

// The unique β-KMS state on A whose corner restriction is φ; p must be full.
KmsState extend_from_corner(const Functional& phi, const InnerFlow& flow, double beta,
                            const Projection& p);

// An element Σ c_i·vertex_i of the β-KMS cone, c_i ≥ 0 (vertex_i normalized).
struct KmsConeElement {
  InnerFlow flow;
  double beta;
  std::vector<double> coefficients;

  Functional functional() const;
};

// Reads block masses off a KMS functional (checks the normal form).
KmsConeElement cone_element(const InnerFlow& flow, double beta, const Functional& omega,
                            double tol = 1e-8);

// The unique central 0 ≤ c ≤ 1 with φ = ψ(c ·). Requires φ ≤ ψ.
AlgElement dominated_decomposition(const KmsConeElement& phi, const KmsConeElement& psi,
                                   double tol = kDefaultTol);

KmsConeElement lattice_join(const KmsConeElement& a, const KmsConeElement& b);
KmsConeElement lattice_meet(const KmsConeElement& a, const KmsConeElement& b);

// φ ≤ ψ as positive functionals (density difference positive).
bool dominated_by(const Functional& phi, const Functional& psi, double tol = kDefaultTol);

}  // namespace kmslab
