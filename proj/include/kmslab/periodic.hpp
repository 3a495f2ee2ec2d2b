#pragma once

// Periodic inner flows: period detection, the spectral components Q_k,
// Cesàro (Fejér) means, trace-scaling exponents, and the gauge-invariant
// Cuntz-word trace.

#include <optional>
#include <vector>

#include "kmslab/flow.hpp"
#include "kmslab/rational.hpp"

namespace kmslab {

// Smallest p > 0 with every spectral gap in (2π/p)ℤ. Returns 0 for a trivial
// flow (every p works) and nullopt when the gaps are incommensurable.
std::optional<double> minimal_period(const InnerFlow& flow, double tol = kDefaultTol);

class PeriodicFlow {
 public:
  // Throws unless every gap λ_j − λ_k lies in (2π/p)ℤ to tolerance.
  PeriodicFlow(InnerFlow flow, double period, double tol = kDefaultTol);

  const InnerFlow& flow() const { return flow_; }
  double period() const { return period_; }
  double frequency() const { return 2.0 * M_PI / period_; }

  // Degree of eigenbasis matrix unit (j,k) in block b: (λ_j − λ_k)·p/2π.
  int degree(int block, int j, int k) const;
  // Sorted degrees with A(k) ≠ 0.
  std::vector<int> occupied_degrees() const;
  int max_abs_degree() const;

 private:
  InnerFlow flow_;
  double period_;
  std::vector<Eigen::MatrixXi> degrees_;
};

AlgElement spectral_component(const PeriodicFlow& p, const AlgElement& a, int k,
                              Method method = Method::closed_form);

// (1/p)∫₀^p e^{-itk2π/p} σ_t(a) dt by the periodic trapezoid rule, with an
// error estimate from doubling the node count.
struct ComponentQuadrature {
  AlgElement value;
  double error_estimate = 0.0;
};
ComponentQuadrature spectral_component_quadrature(const PeriodicFlow& p, const AlgElement& a,
                                                  int k, int nodes);

// (1/(N+1)) Σ_{j=0}^N Σ_{|k|≤j} Q_k(a) = Σ_k (1 − |k|/(N+1))⁺ Q_k(a)
AlgElement fejer_mean(const PeriodicFlow& p, const AlgElement& a, int n_terms);

double fejer_weight(int n_terms, int k);

// Σ_{j=0}^N Σ_{|k|≤j} e^{ikx}; nonnegative, (N+1)² on 2πℤ.
double fejer_kernel(int n_terms, double x);

// β with τ(a*a) = e^{2kπβ/p} τ(aa*) on every A(k), or nullopt when the
// ratios disagree (or no nonzero degree is occupied).
std::optional<double> trace_scaling_beta(const PeriodicFlow& p, const Functional& tau,
                                         double tol = 1e-8);

// ---------------------------------------------------------------------------
// Cuntz words V_a = V_{a_1} ⋯ V_{a_n} over the alphabet {1, …, m}.

struct CuntzWord {
  std::vector<int> letters;

  std::size_t length() const { return letters.size(); }
  bool operator==(const CuntzWord&) const = default;
};

// coefficient · V_a V_b*
struct CuntzMonomial {
  Rational coefficient{1};
  CuntzWord left;
  CuntzWord right;

  int degree() const {
    return static_cast<int>(left.length()) - static_cast<int>(right.length());
  }
};

void validate_word(int m, const CuntzWord& w);

CuntzMonomial adjoint(const CuntzMonomial& x);
// Reduction by V_i* V_j = δ_ij; nullopt when the product vanishes.
std::optional<CuntzMonomial> multiply(const CuntzMonomial& x, const CuntzMonomial& y);

// Trace of the gauge-fixed UHF algebra on V_a V_b*: m^{-|a|} if a = b, else 0.
Rational cuntz_trace(int m, const CuntzWord& a, const CuntzWord& b);
Rational cuntz_trace(int m, const CuntzMonomial& x);

// τ(x*x) / τ(xx*) for x = V_a; equals m^{|a|}.
Rational cuntz_scaling_ratio(int m, const CuntzWord& a);

// log(m)/ρ: the unique inverse temperature of the gauge flow σ^ρ on O_m.
double gauge_kms_beta(int m, double rho);

}  // namespace kmslab
