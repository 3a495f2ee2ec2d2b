#include "kmslab/kms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace kmslab {

namespace {

void check_overflow(const InnerFlow& flow, double beta) {
  if (std::abs(beta) * flow.spectral_radius() > kMaxBetaNorm) {
    std::ostringstream os;
    os << "|beta|*||h|| = " << std::abs(beta) * flow.spectral_radius() << " exceeds " << kMaxBetaNorm;
    fail(ErrorCode::domain, os.str());
  }
}

// Shift c so that every exponent -β(λ - c) is ≤ 0.
double exponent_shift(const InnerFlow& flow, double beta) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& e : flow.eigendata()) {
    lo = std::min(lo, e.values.minCoeff());
    hi = std::max(hi, e.values.maxCoeff());
  }
  return beta >= 0.0 ? lo : hi;
}

// e^{-β(h_b - shift)} for one block
Matrix boltzmann_block(const InnerFlow& flow, int b, double beta, double shift) {
  return flow.eigendata()[b].apply([&](double l) { return Complex(std::exp(-beta * (l - shift))); });
}

bool same_beta(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

KmsState gibbs(const InnerFlow& flow, double beta) {
  check_overflow(flow, beta);
  const double shift = exponent_shift(flow, beta);
  std::vector<Matrix> blocks;
  double z = 0.0;
  for (int b = 0; b < flow.algebra().num_blocks(); ++b) {
    blocks.push_back(boltzmann_block(flow, b, beta, shift));
    z += blocks.back().trace().real();
  }
  for (Matrix& m : blocks) m /= z;
  return {Functional(AlgElement(flow.algebra(), std::move(blocks))), beta, flow};
}

KmsVerdict verify_kms(const InnerFlow& flow, const Functional& omega, double beta, double tol,
                      std::uint64_t seed, int random_samples) {
  require_same_algebra(flow.algebra(), omega.algebra());
  check_overflow(flow, beta);
  KmsVerdict v;

  // Matrix units of the eigenbasis of h, where σ_{iβ}(e_ij) = w_ij e_ij with
  // w_ij = e^{-β(λ_i - λ_j)}. For a = e_ij, b = e_kl the defect
  // ω(ab) - ω(bσ_{iβ}(a)) is δ_jk ρ_li - δ_li w_ij ρ_jk.
  const AlgElement rho_e = flow.to_eigenbasis(omega.density());
  auto consider = [&v](double r, std::array<int, 5> pair) {
    if (r > v.max_residual) {
      v.max_residual = r;
      v.worst_pair = pair;
    }
  };
  for (int blk = 0; blk < flow.algebra().num_blocks(); ++blk) {
    const Matrix& rho = rho_e.block(blk);
    const RealVector& lam = flow.eigendata()[blk].values;
    const int n = static_cast<int>(rho.rows());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double w = std::exp(-beta * (lam(i) - lam(j)));
        consider(std::abs(rho(i, i) - w * rho(j, j)), {blk, i, j, j, i});
        for (int l = 0; l < n; ++l)
          if (l != i) consider(std::abs(rho(l, i)), {blk, i, j, j, l});
        for (int k = 0; k < n; ++k)
          if (k != j && rho(j, k) != 0.0) consider(w * std::abs(rho(j, k)), {blk, i, j, k, i});
      }
  }

  // Cross-check on random elements, evaluated in the eigenbasis.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int s = 0; s < random_samples; ++s) {
    std::vector<Matrix> blocks;
    double norm2 = 0.0;
    for (int n : flow.algebra().block_dims()) {
      Matrix m(n, n);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(gauss(rng), gauss(rng));
      norm2 += m.squaredNorm();
      blocks.push_back(std::move(m));
    }
    Complex lhs = 0.0, rhs = 0.0;
    for (int blk = 0; blk < flow.algebra().num_blocks(); ++blk) {
      const Matrix a = blocks[blk] / std::sqrt(norm2);  // already "in the eigenbasis"
      const RealVector& lam = flow.eigendata()[blk].values;
      Matrix x = a;
      for (Eigen::Index j = 0; j < x.rows(); ++j)
        for (Eigen::Index k = 0; k < x.cols(); ++k) x(j, k) *= std::exp(0.5 * beta * (lam(j) - lam(k)));
      const Matrix& r = rho_e.block(blk);
      lhs += (r * a.adjoint() * a).trace();
      rhs += (r * x * x.adjoint()).trace();
    }
    v.condition2_residual = std::max(v.condition2_residual, std::abs(lhs - rhs));
  }
  const bool pass3 = v.max_residual <= tol;
  const bool pass2 = v.condition2_residual <= tol;
  v.conditions_agree = (pass3 == pass2);
  v.passed = pass3 && pass2;
  return v;
}

KmsState KmsSimplex::combination(std::span<const double> weights) const {
  require(weights.size() == vertices.size(), ErrorCode::invalid_argument,
          "one weight per simplex vertex");
  AlgElement d = AlgElement::zero(vertices.front().functional.algebra());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, ErrorCode::invalid_argument, "negative barycentric weight");
    d += Complex(weights[i]) * vertices[i].functional.density();
    total += weights[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::invalid_argument, "weights must sum to 1");
  return {Functional(std::move(d)), beta, vertices.front().flow};
}

KmsSimplex kms_simplex(const InnerFlow& flow, double beta) {
  check_overflow(flow, beta);
  const double shift = exponent_shift(flow, beta);
  KmsSimplex s{beta, {}};
  for (int b = 0; b < flow.algebra().num_blocks(); ++b) {
    AlgElement d = AlgElement::zero(flow.algebra());
    d.block(b) = boltzmann_block(flow, b, beta, shift);
    d.block(b) /= d.block(b).trace().real();
    s.vertices.push_back({Functional(std::move(d)), beta, flow});
  }
  return s;
}

namespace {

// e^{βh/2} d e^{βh/2} per block, in the eigenbasis of h.
AlgElement untwist(const InnerFlow& flow, const AlgElement& density, double beta) {
  AlgElement e = flow.to_eigenbasis(density);
  for (int b = 0; b < e.num_blocks(); ++b) {
    const RealVector& lam = flow.eigendata()[b].values;
    const double c = 0.5 * (lam.minCoeff() + lam.maxCoeff());
    Matrix& m = e.block(b);
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      for (Eigen::Index k = 0; k < m.cols(); ++k)
        m(j, k) *= std::exp(0.5 * beta * (lam(j) - c)) * std::exp(0.5 * beta * (lam(k) - c));
  }
  return e;  // still in the eigenbasis; centrality is basis independent
}

}  // namespace

double normal_form_residual(const InnerFlow& flow, const Functional& omega, double beta) {
  check_overflow(flow, beta);
  const AlgElement c = untwist(flow, omega.density(), beta);
  double r = 0.0;
  for (const Matrix& m : c.blocks()) {
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    const Complex s = m.trace() / static_cast<double>(m.rows());
    r = std::max(r, (m - s * Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() / scale);
  }
  return r;
}

Functional trace_of(const KmsState& psi) {
  // One shift for every block, so the relative block masses survive.
  const double shift = exponent_shift(psi.flow, psi.beta);
  const AlgElement d = psi.flow.to_eigenbasis(psi.functional.density());
  std::vector<Complex> coeff;
  for (int b = 0; b < d.num_blocks(); ++b) {
    const RealVector& lam = psi.flow.eigendata()[b].values;
    double t = 0.0;
    for (Eigen::Index j = 0; j < lam.size(); ++j) t += d.block(b)(j, j).real() * std::exp(psi.beta * (lam(j) - shift));
    coeff.push_back(t / static_cast<double>(lam.size()));
  }
  return Functional(AlgElement::central(psi.functional.algebra(), coeff)).normalized();
}

KmsState from_trace(const Functional& tau, const InnerFlow& flow, double beta) {
  require_same_algebra(flow.algebra(), tau.algebra());
  require(is_trace(tau, 1e-9 * std::max(1.0, tau.density().max_abs())), ErrorCode::domain,
          "functional is not a trace");
  check_overflow(flow, beta);
  const double shift = exponent_shift(flow, beta);
  std::vector<Matrix> blocks;
  for (int b = 0; b < flow.algebra().num_blocks(); ++b) {
    const Matrix& t = tau.density().block(b);
    const double scalar = t.trace().real() / static_cast<double>(t.rows());
    blocks.push_back(scalar * boltzmann_block(flow, b, beta, shift));
  }
  Functional f(AlgElement(flow.algebra(), std::move(blocks)));
  return {f.normalized(), beta, flow};
}

// ---------------------------------------------------------------------------

AlgElement CornerEmbedding::compress(const AlgElement& a) const {
  std::vector<Matrix> out;
  for (std::size_t j = 0; j < isometries.size(); ++j) {
    const Matrix& v = isometries[j];
    out.push_back(v.adjoint() * a.block(source_blocks[j]) * v);
  }
  return AlgElement(corner, std::move(out));
}

CornerEmbedding corner_embedding(const InnerFlow& flow, const Projection& p, double tol) {
  require_same_algebra(flow.algebra(), p.algebra());
  const AlgElement comm = commutator(p.element(), flow.generator());
  require(comm.max_abs() <= tol * std::max(1.0, flow.spectral_radius()), ErrorCode::domain,
          "corner not flow-invariant");
  CornerEmbedding emb{BlockAlgebra({1}), {}, {}};
  std::vector<int> dims;
  for (int b = 0; b < p.algebra().num_blocks(); ++b) {
    const HermitianEigen e = hermitian_eigen(p.element().block(b));
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
      if (e.values(i) > 0.5) cols.push_back(i);
    if (cols.empty()) continue;
    Matrix v(e.vectors.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) v.col(Eigen::Index(c)) = e.vectors.col(cols[c]);
    emb.isometries.push_back(std::move(v));
    emb.source_blocks.push_back(b);
    dims.push_back(static_cast<int>(cols.size()));
  }
  require(!dims.empty(), ErrorCode::domain, "corner of the zero projection");
  emb.corner = BlockAlgebra(dims);
  return emb;
}

CornerRestriction restrict_to_corner(const KmsState& psi, const Projection& p) {
  CornerEmbedding emb = corner_embedding(psi.flow, p);
  const double mass = psi.functional(p.element()).real();
  require(mass > 1e-300, ErrorCode::domain, "psi(p) = 0: corner restriction undefined");
  InnerFlow compressed(emb.compress(psi.flow.generator()));
  AlgElement d = emb.compress(psi.functional.density());
  d *= 1.0 / mass;
  Functional f(std::move(d));
  return {std::move(emb), std::move(compressed), std::move(f), mass, p.is_full()};
}

KmsState extend_from_corner(const Functional& phi, const InnerFlow& flow, double beta,
                            const Projection& p) {
  require(p.is_full(), ErrorCode::domain, "corner not full: extension not unique");
  check_overflow(flow, beta);
  const CornerEmbedding emb = corner_embedding(flow, p);
  require_same_algebra(emb.corner, phi.algebra());
  const InnerFlow compressed(emb.compress(flow.generator()));
  const KmsVerdict v = verify_kms(compressed, phi.normalized(), beta, 1e-8);
  require(v.passed, ErrorCode::domain, "corner functional is not beta-KMS for the compressed flow");

  // Restricting Σ_i c_i e^{-β(h_i - s)} to corner block j gives c_i e^{-β(h'_j - s)};
  // matching masses solves for c_i.
  const double shift = exponent_shift(flow, beta);
  std::vector<Matrix> blocks;
  for (int b = 0; b < flow.algebra().num_blocks(); ++b) blocks.push_back(boltzmann_block(flow, b, beta, shift));
  for (std::size_t j = 0; j < emb.isometries.size(); ++j) {
    const int b = emb.source_blocks[j];
    const double corner_mass =
        compressed.eigendata()[j].apply([&](double l) { return Complex(std::exp(-beta * (l - shift))); })
            .trace().real();
    blocks[b] *= phi.density().block(static_cast<int>(j)).trace().real() / corner_mass;
  }
  Functional f(AlgElement(flow.algebra(), std::move(blocks)));
  return {f.normalized(), beta, flow};
}

// ---------------------------------------------------------------------------

Functional KmsConeElement::functional() const {
  const KmsSimplex s = kms_simplex(flow, beta);
  AlgElement d = AlgElement::zero(flow.algebra());
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    d += Complex(coefficients[i]) * s.vertices[i].functional.density();
  return Functional(std::move(d));
}

KmsConeElement cone_element(const InnerFlow& flow, double beta, const Functional& omega, double tol) {
  require_same_algebra(flow.algebra(), omega.algebra());
  require(normal_form_residual(flow, omega, beta) <= tol, ErrorCode::domain,
          "functional is not in the beta-KMS cone");
  return {flow, beta, omega.block_masses()};
}

bool dominated_by(const Functional& phi, const Functional& psi, double tol) {
  const AlgElement diff = psi.density() - phi.density();
  const double scale = std::max(1.0, psi.density().max_abs());
  return min_eigenvalue(diff, tol * scale) >= -tol * scale;
}

namespace {

void check_compatible(const KmsConeElement& a, const KmsConeElement& b) {
  require_same_algebra(a.flow.algebra(), b.flow.algebra());
  require(same_beta(a.beta, b.beta), ErrorCode::invalid_argument, "mixed beta inputs");
  require((a.flow.generator() - b.flow.generator()).max_abs() <= 1e-12, ErrorCode::invalid_argument,
          "cone elements belong to different flows");
}

}  // namespace

AlgElement dominated_decomposition(const KmsConeElement& phi, const KmsConeElement& psi, double tol) {
  check_compatible(phi, psi);
  const Functional fphi = phi.functional();
  const Functional fpsi = psi.functional();
  const AlgElement diff = fpsi.density() - fphi.density();
  const double scale = std::max(1.0, fpsi.density().max_abs());
  for (int b = 0; b < diff.num_blocks(); ++b) {
    const HermitianEigen e = hermitian_eigen(diff.block(b));
    if (e.values(0) < -tol * scale) {
      std::ostringstream os;
      os << "phi is not dominated by psi: block " << b << " eigenvalue " << e.values(0)
         << " along direction [";
      for (Eigen::Index i = 0; i < e.vectors.rows(); ++i)
        os << (i ? ", " : "") << e.vectors(i, 0).real() << (e.vectors(i, 0).imag() >= 0 ? "+" : "")
           << e.vectors(i, 0).imag() << "i";
      os << "]";
      fail(ErrorCode::domain, os.str());
    }
  }
  std::vector<Complex> c;
  for (std::size_t i = 0; i < psi.coefficients.size(); ++i)
    c.push_back(psi.coefficients[i] > 1e-12 ? phi.coefficients[i] / psi.coefficients[i] : 0.0);
  AlgElement central = AlgElement::central(fpsi.algebra(), c);
  const double resid = (fphi.density() - central * fpsi.density()).max_abs();
  require(resid <= 1e-10 * scale, ErrorCode::numerical, "domination reconstruction failed");
  return central;
}

KmsConeElement lattice_join(const KmsConeElement& a, const KmsConeElement& b) {
  check_compatible(a, b);
  KmsConeElement out = a;
  for (std::size_t i = 0; i < out.coefficients.size(); ++i)
    out.coefficients[i] = std::max(a.coefficients[i], b.coefficients[i]);
  return out;
}

KmsConeElement lattice_meet(const KmsConeElement& a, const KmsConeElement& b) {
  check_compatible(a, b);
  KmsConeElement out = a;
  for (std::size_t i = 0; i < out.coefficients.size(); ++i)
    out.coefficients[i] = std::min(a.coefficients[i], b.coefficients[i]);
  return out;
}

}  // namespace kmslab
