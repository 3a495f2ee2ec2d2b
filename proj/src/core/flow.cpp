#include "kmslab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kmslab/quadrature.hpp"

namespace kmslab {

InnerFlow::InnerFlow(AlgElement generator, double tol) : generator_(std::move(generator)) {
  require(generator_.is_hermitian(tol), ErrorCode::domain, "flow generator not self-adjoint");
  for (const Matrix& b : generator_.blocks()) eigen_.push_back(hermitian_eigen(b));
}

AlgElement InnerFlow::to_eigenbasis(const AlgElement& a) const {
  require_same_algebra(algebra(), a.algebra());
  std::vector<Matrix> out;
  for (int i = 0; i < a.num_blocks(); ++i) {
    const Matrix& u = eigen_[i].vectors;
    out.push_back(u.adjoint() * a.block(i) * u);
  }
  return AlgElement(a.algebra(), std::move(out));
}

AlgElement InnerFlow::from_eigenbasis(const AlgElement& a) const {
  require_same_algebra(algebra(), a.algebra());
  std::vector<Matrix> out;
  for (int i = 0; i < a.num_blocks(); ++i) {
    const Matrix& u = eigen_[i].vectors;
    out.push_back(u * a.block(i) * u.adjoint());
  }
  return AlgElement(a.algebra(), std::move(out));
}

AlgElement InnerFlow::evolve(const AlgElement& a, double t) const {
  return continue_analytic(a, Complex(t, 0.0));
}

AlgElement InnerFlow::continue_analytic(const AlgElement& a, Complex z) const {
  if (std::abs(z.imag()) > kMaxImaginaryTime) {
    std::ostringstream os;
    os << "|Im z| = " << std::abs(z.imag()) << " exceeds the cap " << kMaxImaginaryTime;
    fail(ErrorCode::domain, os.str());
  }
  AlgElement e = to_eigenbasis(a);
  for (int b = 0; b < e.num_blocks(); ++b) {
    const RealVector& lam = eigen_[b].values;
    Matrix& m = e.block(b);
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      for (Eigen::Index k = 0; k < m.cols(); ++k)
        m(j, k) *= std::exp(kI * z * (lam(j) - lam(k)));
  }
  return from_eigenbasis(e);
}

double InnerFlow::spectral_diameter() const {
  double d = 0.0;
  for (const auto& e : eigen_) d = std::max(d, e.values.maxCoeff() - e.values.minCoeff());
  return d;
}

double InnerFlow::spectral_radius() const {
  double r = 0.0;
  for (const auto& e : eigen_) r = std::max(r, e.values.cwiseAbs().maxCoeff());
  return r;
}

bool InnerFlow::is_trivial(double tol) const { return generator_.is_central(tol); }

double InnerFlow::reconstruction_residual() const {
  double r = 0.0;
  for (int i = 0; i < generator_.num_blocks(); ++i) {
    const auto& e = eigen_[i];
    const Matrix rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    r = std::max(r, (rebuilt - generator_.block(i)).cwiseAbs().maxCoeff());
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

AlgElement smooth_closed_form(const InnerFlow& flow, const AlgElement& a, int n, Complex z) {
  AlgElement e = flow.to_eigenbasis(a);
  for (int b = 0; b < e.num_blocks(); ++b) {
    const RealVector& lam = flow.eigendata()[b].values;
    Matrix& m = e.block(b);
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      for (Eigen::Index k = 0; k < m.cols(); ++k) {
        const double d = lam(j) - lam(k);
        m(j, k) *= std::exp(-d * d / (4.0 * n)) * std::exp(kI * z * d);
      }
  }
  return flow.from_eigenbasis(e);
}

AlgElement gauss_hermite_sum(const InnerFlow& flow, const AlgElement& a, int n, Complex z,
                             const GaussHermiteRule& rule) {
  // s = z + u/√n turns the shifted Gaussian into e^{-u²}.
  AlgElement acc = AlgElement::zero(a.algebra());
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < rule.size(); ++m) {
    const Complex s = z + rule.nodes[m] * inv_sqrt_n;
    acc += Complex(rule.weights[m]) * flow.continue_analytic(a, s);
  }
  acc *= 1.0 / std::sqrt(M_PI);
  return acc;
}

void check_order(int n) { require(n >= 1, ErrorCode::invalid_argument, "smoothing order n must be >= 1"); }

}  // namespace

QuadratureResult smooth_shifted_quadrature(const InnerFlow& flow, const AlgElement& a, int n,
                                           Complex z, int nodes) {
  check_order(n);
  const GaussHermiteRule coarse(nodes);
  const GaussHermiteRule fine(nodes + nodes / 2 + 1);
  AlgElement q = gauss_hermite_sum(flow, a, n, z, coarse);
  const AlgElement qf = gauss_hermite_sum(flow, a, n, z, fine);
  const double scale = std::max(qf.frobenius_norm(), 1e-300);
  const double est = (q - qf).frobenius_norm() / scale;
  return {std::move(q), est};
}

AlgElement smooth(const InnerFlow& flow, const AlgElement& a, int n, Method method,
                  SmoothingOptions opts) {
  return smooth_shifted(flow, a, n, Complex(0.0, 0.0), method, opts);
}

AlgElement smooth_shifted(const InnerFlow& flow, const AlgElement& a, int n, Complex z,
                          Method method, SmoothingOptions opts) {
  check_order(n);
  require_same_algebra(flow.algebra(), a.algebra());
  if (method == Method::closed_form) return smooth_closed_form(flow, a, n, z);
  QuadratureResult r = smooth_shifted_quadrature(flow, a, n, z, opts.nodes);
  if (!(r.error_estimate <= opts.tolerance)) {
    std::ostringstream os;
    os << "Gauss-Hermite quadrature did not converge: estimated relative error "
       << r.error_estimate << " > " << opts.tolerance;
    fail(ErrorCode::numerical, os.str());
  }
  return std::move(r.value);
}

StripCheckReport strip_check(const InnerFlow& flow, const Functional& omega, const AlgElement& a,
                             const AlgElement& b, double beta, std::span<const double> t_samples) {
  StripCheckReport rep;
  rep.beta = beta;
  for (double t : t_samples) {
    const AlgElement at = flow.evolve(a, t);
    const Complex lower = omega(b * flow.continue_analytic(a, Complex(t, 0.0)));
    const Complex upper = omega(b * flow.continue_analytic(a, Complex(t, beta)));
    rep.max_residual_lower = std::max(rep.max_residual_lower, std::abs(lower - omega(b * at)));
    rep.max_residual_upper = std::max(rep.max_residual_upper, std::abs(upper - omega(at * b)));
    ++rep.sample_count;
  }
  return rep;
}

}  // namespace kmslab
