#pragma once

// Inner flows σ_t = Ad e^{ith} on a BlockAlgebra and their complex-time
// continuation σ_z(a) = e^{izh} a e^{-izh}, evaluated in the eigenbasis of h.

#include <span>
#include <vector>

#include "kmslab/algebra.hpp"

namespace kmslab {

// |Im z| above this is refused rather than clamped.
inline constexpr double kMaxImaginaryTime = 50.0;

class InnerFlow {
 public:
  explicit InnerFlow(AlgElement generator, double tol = kDefaultTol);

  const BlockAlgebra& algebra() const { return generator_.algebra(); }
  const AlgElement& generator() const { return generator_; }
  const std::vector<HermitianEigen>& eigendata() const { return eigen_; }

  // Conjugation into / out of the eigenbasis of h, block by block.
  AlgElement to_eigenbasis(const AlgElement& a) const;
  AlgElement from_eigenbasis(const AlgElement& a) const;

  AlgElement evolve(const AlgElement& a, double t) const;
  AlgElement continue_analytic(const AlgElement& a, Complex z) const;

  // max over blocks of (λ_max - λ_min)
  double spectral_diameter() const;
  // max_j |λ_j|
  double spectral_radius() const;
  bool is_trivial(double tol = kDefaultTol) const;  // h central

  // max |h - U Λ U*|
  double reconstruction_residual() const;

 private:
  AlgElement generator_;
  std::vector<HermitianEigen> eigen_;
};

enum class Method { closed_form, quadrature };

struct SmoothingOptions {
  int nodes = 64;                   // Gauss–Hermite nodes
  double tolerance = 1e-8;          // relative, for the quadrature self-check
};

struct QuadratureResult {
  AlgElement value;
  double error_estimate = 0.0;  // relative difference against a 1.5x finer rule
};

// R_n(a) = √(n/π) ∫ e^{-ns²} σ_s(a) ds
AlgElement smooth(const InnerFlow& flow, const AlgElement& a, int n,
                  Method method = Method::closed_form, SmoothingOptions opts = {});

// σ_z(R_n(a)) = √(n/π) ∫ e^{-n(s-z)²} σ_s(a) ds
AlgElement smooth_shifted(const InnerFlow& flow, const AlgElement& a, int n, Complex z,
                          Method method = Method::closed_form, SmoothingOptions opts = {});

// Quadrature path with its error estimate; does not throw on poor convergence.
QuadratureResult smooth_shifted_quadrature(const InnerFlow& flow, const AlgElement& a, int n,
                                           Complex z, int nodes);

struct StripCheckReport {
  double beta = 0.0;
  double max_residual_lower = 0.0;  // |f(t) - ω(b σ_t(a))|
  double max_residual_upper = 0.0;  // |f(t+iβ) - ω(σ_t(a) b)|
  int sample_count = 0;
};

// f(z) := ω(b σ_z(a)); checks both strip boundaries at the sampled t.
StripCheckReport strip_check(const InnerFlow& flow, const Functional& omega, const AlgElement& a,
                             const AlgElement& b, double beta, std::span<const double> t_samples);

}  // namespace kmslab
