#include "kmslab/modular.hpp"

#include <algorithm>
#include <cmath>

namespace kmslab {

namespace {

// G(m,n) = ω(E_m* E_n); for E_m = e_ij, E_n = e_kl in one block this is δ_ik d_lj.
Matrix gram_matrix(const Functional& omega) {
  const BlockAlgebra& alg = omega.algebra();
  const int total = alg.total_dimension();
  Matrix g = Matrix::Zero(total, total);
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.block_dim(b), o = alg.flat_offset(b);
    const Matrix& d = omega.density().block(b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) g(o + i * n + j, o + i * n + l) = d(l, j);
  }
  return g;
}

// Modified Gram–Schmidt of the matrix units in the G inner product, with one
// reorthogonalization pass. Columns that fall below the pivot are dropped.
Matrix gram_schmidt(const Matrix& g, double pivot) {
  const Eigen::Index total = g.rows();
  const double scale = std::max(g.diagonal().real().maxCoeff(), 1e-300);
  std::vector<Vector> qs, gqs;
  for (Eigen::Index m = 0; m < total; ++m) {
    Vector v = Vector::Zero(total);
    v(m) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < qs.size(); ++k) v -= qs[k] * gqs[k].dot(v);
    Vector gv = g * v;
    const double norm2 = v.dot(gv).real();
    if (norm2 <= pivot * scale) continue;
    const double norm = std::sqrt(norm2);
    qs.push_back(v / norm);
    gqs.push_back(gv / norm);
  }
  Matrix t(total, static_cast<Eigen::Index>(qs.size()));
  for (std::size_t k = 0; k < qs.size(); ++k) t.col(Eigen::Index(k)) = qs[k];
  return t;
}

GnsTriple build_gns(const Functional& omega) {
  require(omega.mass() > 0.0, ErrorCode::domain, "GNS of the zero functional");
  const Matrix g = gram_matrix(omega);
  Matrix t = gram_schmidt(g, 1e-12);
  Matrix r = t.adjoint() * g;
  const int dim = static_cast<int>(t.cols());
  return {omega.algebra(), omega, dim, std::move(t), std::move(r)};
}

Matrix unitary_power(const HermitianEigen& e, double t) {
  return e.apply([&](double l) { return std::exp(kI * t * std::log(l)); });
}

Matrix apply_antilinear(const Matrix& k, const Matrix& x) { return k * x.conjugate(); }

}  // namespace

Vector GnsTriple::lambda(const AlgElement& a) const {
  require_same_algebra(algebra, a.algebra());
  return coordinates * a.flatten();
}

Matrix GnsTriple::rep(const AlgElement& a) const {
  require_same_algebra(algebra, a.algebra());
  return coordinates * left_multiplication(a) * basis_change;
}

GnsTriple gns(const Functional& omega) {
  require(omega.is_faithful(), ErrorCode::domain, "density not strictly positive");
  GnsTriple g = build_gns(omega);
  require(g.hilbert_dim == omega.algebra().total_dimension(), ErrorCode::numerical,
          "density too ill-conditioned for the GNS basis");
  return g;
}

GnsTriple gns_cyclic(const Functional& omega) { return build_gns(omega); }

Matrix left_multiplication(const AlgElement& a) {
  const BlockAlgebra& alg = a.algebra();
  const int total = alg.total_dimension();
  Matrix l = Matrix::Zero(total, total);
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.block_dim(b), o = alg.flat_offset(b);
    const Matrix& m = a.block(b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) l(o + i * n + k, o + j * n + k) = m(i, j);
  }
  return l;
}

Matrix right_multiplication(const AlgElement& a) {
  const BlockAlgebra& alg = a.algebra();
  const int total = alg.total_dimension();
  Matrix r = Matrix::Zero(total, total);
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.block_dim(b), o = alg.flat_offset(b);
    const Matrix& m = a.block(b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) r(o + i * n + k, o + i * n + j) = m(j, k);
  }
  return r;
}

Matrix adjoint_permutation(const BlockAlgebra& alg) {
  const int total = alg.total_dimension();
  Matrix c = Matrix::Zero(total, total);
  for (int b = 0; b < alg.num_blocks(); ++b) {
    const int n = alg.block_dim(b), o = alg.flat_offset(b);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) c(o + i * n + k, o + k * n + i) = 1.0;
  }
  return c;
}

ModularData modular_data(const GnsTriple& g) {
  require(g.hilbert_dim == g.algebra.total_dimension(), ErrorCode::domain,
          "modular data needs a faithful state");
  const Eigen::Index n = g.hilbert_dim;
  ModularData md;
  // Λ(a*) = R C conj(vec a) = R C conj(T) conj(Λ(a))
  md.s_operator = g.coordinates * adjoint_permutation(g.algebra) * g.basis_change.conjugate();
  const RealMatrix s_real = realify(md.s_operator) * conjugation_real(n);
  md.delta_real = s_real.transpose() * s_real;
  md.delta_real = 0.5 * (md.delta_real + md.delta_real.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(md.delta_real);
  require(es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0, ErrorCode::numerical,
          "S*S is not positive definite");
  const RealVector inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const RealMatrix abs_inv = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  md.j_real = s_real * abs_inv;

  md.delta = complexify(md.delta_real);
  md.conjugation = complexify(md.j_real * conjugation_real(n));
  md.spectrum = hermitian_eigen(md.delta).values;
  return md;
}

ModularData modular_oracle(const GnsTriple& g) {
  require(g.hilbert_dim == g.algebra.total_dimension(), ErrorCode::domain,
          "modular data needs a faithful state");
  const Eigen::Index n = g.hilbert_dim;
  const AlgElement& rho = g.omega.density();
  const AlgElement rho_half = functional_calculus(rho, [](double l) { return Complex(std::sqrt(l)); });
  const AlgElement rho_inv = functional_calculus(rho, [](double l) { return Complex(1.0 / l); });

  // u: GNS coordinates -> flattened aρ^{1/2}
  const Matrix u = right_multiplication(rho_half) * g.basis_change;
  const Matrix delta_hs = left_multiplication(rho) * right_multiplication(rho_inv);
  ModularData md;
  md.delta = u.adjoint() * delta_hs * u;
  md.conjugation = u.adjoint() * adjoint_permutation(g.algebra) * u.conjugate();
  md.delta_real = realify(md.delta);
  md.j_real = realify(md.conjugation) * conjugation_real(n);
  md.spectrum = hermitian_eigen(md.delta).values;
  const Matrix delta_half = hermitian_eigen(md.delta).apply([](double l) { return Complex(std::sqrt(std::max(l, 0.0))); });
  // S = JΔ^{1/2}: S(x) = K conj(Δ^{1/2} x) = K conj(Δ^{1/2}) conj(x)
  md.s_operator = md.conjugation * delta_half.conjugate();
  return md;
}

ModularComparison compare_with_oracle(const ModularData& m, const ModularData& oracle) {
  return {(m.delta - oracle.delta).cwiseAbs().maxCoeff(),
          (m.conjugation - oracle.conjugation).cwiseAbs().maxCoeff()};
}

ModularIdentities check_modular_identities(const GnsTriple& g, const ModularData& m) {
  ModularIdentities id;
  const Eigen::Index n2 = m.j_real.rows();
  id.j_involution = (m.j_real * m.j_real - RealMatrix::Identity(n2, n2)).cwiseAbs().maxCoeff();
  id.j_symmetric = (m.j_real - m.j_real.transpose()).cwiseAbs().maxCoeff();
  const RealMatrix inv = m.delta_real.inverse();
  id.j_delta_j = (m.j_real * m.delta_real * m.j_real - inv).cwiseAbs().maxCoeff() /
                 std::max(1.0, inv.cwiseAbs().maxCoeff());
  const Matrix delta_half =
      hermitian_eigen(m.delta).apply([](double l) { return Complex(std::sqrt(std::max(l, 0.0))); });
  const BlockAlgebra& alg = g.algebra;
  for (int b = 0; b < alg.num_blocks(); ++b)
    for (int i = 0; i < alg.block_dim(b); ++i)
      for (int j = 0; j < alg.block_dim(b); ++j) {
        const AlgElement e = AlgElement::matrix_unit(alg, b, i, j);
        const Vector lhs = apply_antilinear(m.conjugation, delta_half * g.lambda(e));
        const Vector rhs = g.lambda(e.adjoint());
        id.s_on_lambda = std::max(id.s_on_lambda, (lhs - rhs).cwiseAbs().maxCoeff());
      }
  return id;
}

KmsVerdict verify_modular_flow(const InnerFlow& flow, const KmsState& psi, double tol) {
  return verify_modular_flow(flow, psi, psi.beta, tol);
}

KmsVerdict verify_modular_flow(const InnerFlow& flow, const KmsState& psi, double beta,
                               double tol) {
  require_same_algebra(flow.algebra(), psi.functional.algebra());
  const GnsTriple g = gns(psi.functional);
  const ModularData md = modular_data(g);
  const HermitianEigen de = hermitian_eigen(md.delta);
  KmsVerdict v;
  v.condition2_residual = 0.0;
  const BlockAlgebra& alg = g.algebra;
  for (std::size_t ti = 0; ti < std::size(kModularFlowTimes); ++ti) {
    const double t = kModularFlowTimes[ti];
    const Matrix u = unitary_power(de, t);
    for (int b = 0; b < alg.num_blocks(); ++b)
      for (int i = 0; i < alg.block_dim(b); ++i)
        for (int j = 0; j < alg.block_dim(b); ++j) {
          const AlgElement e = AlgElement::matrix_unit(alg, b, i, j);
          const Matrix lhs = u * g.rep(e) * u.adjoint();
          const Matrix rhs = g.rep(flow.evolve(e, -beta * t));
          const double r = (lhs - rhs).cwiseAbs().maxCoeff();
          if (r > v.max_residual) {
            v.max_residual = r;
            v.worst_pair = {b, i, j, static_cast<int>(ti), 0};
          }
        }
  }
  v.passed = v.max_residual <= tol;
  return v;
}

CommutantReport verify_commutant_theorem(const GnsTriple& g, const ModularData& m, double tol) {
  const BlockAlgebra& alg = g.algebra;
  const int n = g.hilbert_dim;
  std::vector<Matrix> reps;
  for (int b = 0; b < alg.num_blocks(); ++b)
    for (int i = 0; i < alg.block_dim(b); ++i)
      for (int j = 0; j < alg.block_dim(b); ++j)
        reps.push_back(g.rep(AlgElement::matrix_unit(alg, b, i, j)));
  const std::vector<Matrix> comm = commutant_basis(reps, n);

  auto stack = [n](const std::vector<Matrix>& ms) {
    Matrix cols(Eigen::Index(n) * n, static_cast<Eigen::Index>(ms.size()));
    for (std::size_t k = 0; k < ms.size(); ++k)
      cols.col(Eigen::Index(k)) = Eigen::Map<const Vector>(ms[k].data(), ms[k].size());
    return cols;
  };
  std::vector<Matrix> twisted;
  const Matrix& k = m.conjugation;
  for (const Matrix& x : comm) twisted.push_back(k * x.conjugate() * k.conjugate());

  const Matrix span_a = orthonormal_span(stack(reps), 1e-12);
  const Matrix span_c = orthonormal_span(stack(twisted), 1e-12);
  CommutantReport rep;
  rep.commutant_dimension = static_cast<int>(span_c.cols());
  rep.algebra_dimension = static_cast<int>(span_a.cols());
  rep.subspace_distance = rep.commutant_dimension == rep.algebra_dimension
                              ? subspace_distance(span_a, span_c)
                              : 1.0;
  rep.holds = rep.commutant_dimension == rep.algebra_dimension && rep.subspace_distance <= tol;
  return rep;
}

int center_dimension(const GnsTriple& g) {
  const BlockAlgebra& alg = g.algebra;
  std::vector<Matrix> gens;
  for (int b = 0; b < alg.num_blocks(); ++b)
    for (int i = 0; i < alg.block_dim(b); ++i)
      for (int j = 0; j < alg.block_dim(b); ++j)
        gens.push_back(g.rep(AlgElement::matrix_unit(alg, b, i, j)));
  const std::vector<Matrix> comm = commutant_basis(gens, g.hilbert_dim);
  gens.insert(gens.end(), comm.begin(), comm.end());
  return static_cast<int>(commutant_basis(gens, g.hilbert_dim).size());
}

AlgElement intertwining_unitary(const Projection& p, const Projection& q) {
  require_same_algebra(p.algebra(), q.algebra());
  const AlgElement& pe = p.element();
  const AlgElement& qe = q.element();
  require((pe - qe).operator_norm() < 1.0 - 1e-12, ErrorCode::domain, "projections too far apart");
  const AlgElement one = AlgElement::identity(pe.algebra());
  const AlgElement x = qe * pe + (one - qe) * (one - pe);
  const AlgElement xx = x.adjoint() * x;
  const AlgElement inv_sqrt = functional_calculus(xx, [](double l) { return Complex(1.0 / std::sqrt(l)); });
  AlgElement v = inv_sqrt * x.adjoint();
  require((v * qe * v.adjoint() - pe).max_abs() <= 1e-10, ErrorCode::numerical,
          "intertwiner residual above 1e-10");
  return v;
}

}  // namespace kmslab
