#include <doctest.h>

#include <cmath>

#include "kmslab/kms.hpp"
#include "support.hpp"

using namespace kmslab;
using namespace kmslab::testing;

namespace {

// Sum of a random nonempty set of eigenprojections of h in each block.
Projection random_invariant_projection(const InnerFlow& flow) {
  std::vector<Matrix> blocks;
  for (const HermitianEigen& e : flow.eigendata()) {
    const Eigen::Index n = e.values.size();
    Matrix p = Matrix::Zero(n, n);
    bool any = false;
    for (Eigen::Index i = 0; i < n; ++i)
      if (uniform(0, 1) < 0.5 || (!any && i == n - 1)) {
        p += e.vectors.col(i) * e.vectors.col(i).adjoint();
        any = true;
      }
    blocks.push_back(p);
  }
  return Projection(AlgElement(flow.algebra(), std::move(blocks)), 1e-9);
}

}  // namespace

TEST_CASE("Gibbs state of diag(0, log 2) at beta = 1") {
  const BlockAlgebra a({2});
  const InnerFlow flow(diagonal(a, {{0.0, std::log(2.0)}}));
  const KmsState s = gibbs(flow, 1.0);
  CHECK(s.functional.density().block(0)(0, 0).real() == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(s.functional.density().block(0)(1, 1).real() == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(s.functional(AlgElement::matrix_unit(a, 0, 0, 0)).real() == doctest::Approx(2.0 / 3));
}

TEST_CASE("Gibbs states pass verification for random generators") {
  for (int rep = 0; rep < 20; ++rep) {
    const BlockAlgebra a({rep % 2 ? 5 : 3, 2});
    const InnerFlow flow = random_flow(a, uniform(0.1, 2.0));
    for (double beta : {-2.0, 0.0, 0.5, 3.0}) {
      const KmsVerdict v = verify_kms(flow, gibbs(flow, beta).functional, beta);
      CHECK(v.passed);
      CHECK(v.max_residual <= 1e-9);
      CHECK(v.conditions_agree);
    }
  }
}

TEST_CASE("the wrong pairing fails with residual (e - 1)/2") {
  const BlockAlgebra a({2});
  const InnerFlow flow(diagonal(a, {{0.0, 1.0}}));
  const KmsVerdict v = verify_kms(flow, tracial_state(a), 1.0);
  CHECK_FALSE(v.passed);
  CHECK(std::abs(v.max_residual - (std::exp(1.0) - 1) / 2) < 1e-9);
  CHECK(v.condition2_residual > 1e-3);
  CHECK(v.conditions_agree);
  // the Gibbs state at another beta fails too
  CHECK_FALSE(verify_kms(flow, gibbs(flow, 2.0).functional, 1.0).passed);
}

TEST_CASE("verification is deterministic in the seed") {
  const BlockAlgebra a({3});
  const InnerFlow flow = random_flow(a);
  const Functional f = gibbs(flow, 0.7).functional;
  const KmsVerdict v1 = verify_kms(flow, f, 0.7, kDefaultTol, 5);
  const KmsVerdict v2 = verify_kms(flow, f, 0.7, kDefaultTol, 5);
  CHECK(v1.condition2_residual == v2.condition2_residual);
}

TEST_CASE("overflow guard") {
  const BlockAlgebra a({2});
  const InnerFlow flow(diagonal(a, {{0.0, 10.0}}));
  CHECK_NOTHROW(gibbs(flow, 69.0));
  CHECK_THROWS_WITH(gibbs(flow, 71.0), doctest::Contains("exceeds"));
  // large but admissible beta still normalizes
  const KmsState s = gibbs(flow, -69.0);
  CHECK(s.functional.mass() == doctest::Approx(1.0));
}

TEST_CASE("simplex vertex counts and convex combinations") {
  for (int n = 1; n <= 4; ++n) {
    const BlockAlgebra a({n});
    CHECK(kms_simplex(random_flow(a), 0.9).vertices.size() == 1);
  }
  const BlockAlgebra a({2, 3, 1});
  const InnerFlow flow = random_flow(a, 2.0);
  const KmsSimplex s = kms_simplex(flow, -1.2);
  CHECK(s.vertices.size() == 3);
  CHECK(s.dimension() == 2);
  for (int rep = 0; rep < 20; ++rep) {
    double w[3] = {uniform(0, 1), uniform(0, 1), uniform(0, 1)};
    const double t = w[0] + w[1] + w[2];
    for (double& x : w) x /= t;
    const KmsState c = s.combination(w);
    CHECK(c.functional.mass() == doctest::Approx(1.0));
    CHECK(verify_kms(flow, c.functional, -1.2).passed);
  }
  const double bad[3] = {1.5, -0.5, 0.0};
  CHECK_THROWS_AS(s.combination(bad), Error);
}

TEST_CASE("normal form: Gibbs states are central after untwisting") {
  const BlockAlgebra a({3, 2});
  const InnerFlow flow = random_flow(a);
  CHECK(normal_form_residual(flow, gibbs(flow, 1.1).functional, 1.1) < 1e-12);
  CHECK(normal_form_residual(flow, Functional(random_density(a)), 1.1) > 1e-4);
}

TEST_CASE("trace bijection: from_trace o trace_of is the identity") {
  for (int rep = 0; rep < 50; ++rep) {
    const BlockAlgebra a({2, 3});
    const InnerFlow flow = random_flow(a, 2.0);
    const double beta = uniform(-3, 3);
    const KmsSimplex s = kms_simplex(flow, beta);
    const double w0 = uniform(0, 1);
    const double w[2] = {w0, 1 - w0};
    const KmsState psi = s.combination(w);
    const Functional tau = trace_of(psi);
    CHECK(is_trace(tau));
    const KmsState back = from_trace(tau, flow, beta);
    CHECK(max_abs_diff(back.functional.density(), psi.functional.density()) < 1e-10);
  }
  const BlockAlgebra a({2});
  const InnerFlow flow(diagonal(a, {{0.0, 1.0}}));
  CHECK_THROWS_AS(from_trace(Functional(diagonal(a, {{0.9, 0.1}})), flow, 1.0), Error);
}

TEST_CASE("corner restriction and extension round trip") {
  for (int rep = 0; rep < 10; ++rep) {
    const BlockAlgebra a({2, 3});
    const InnerFlow flow = random_flow(a, 2.0);
    const double beta = uniform(-2, 2);
    const double w0 = uniform(0.05, 0.95);
    const double w[2] = {w0, 1 - w0};
    const KmsState psi = kms_simplex(flow, beta).combination(w);
    const Projection p = random_invariant_projection(flow);
    const CornerRestriction r = restrict_to_corner(psi, p);
    CHECK(r.full);
    CHECK(r.state.mass() == doctest::Approx(1.0));
    CHECK(verify_kms(r.compressed_flow, r.state, beta, 1e-9).passed);
    const KmsState back = extend_from_corner(r.state, flow, beta, p);
    CHECK(max_abs_diff(back.functional.density(), psi.functional.density()) < 1e-10);
  }
}

TEST_CASE("corner checks") {
  const BlockAlgebra a({2, 2});
  const InnerFlow flow(diagonal(a, {{0.0, 1.0}, {0.5, 2.0}}));
  // not invariant
  std::vector<Matrix> blocks{Matrix::Constant(2, 2, 0.5), Matrix::Identity(2, 2)};
  const Projection q(AlgElement(a, blocks));
  CHECK_THROWS_WITH(corner_embedding(flow, q), doctest::Contains("flow-invariant"));
  // not full
  const Projection p(diagonal(a, {{1.0, 0.0}, {0.0, 0.0}}));
  const KmsState psi = gibbs(flow, 1.0);
  CHECK_FALSE(restrict_to_corner(psi, p).full);
  CHECK_THROWS_WITH(extend_from_corner(restrict_to_corner(psi, p).state, flow, 1.0, p),
                    doctest::Contains("not full"));
  // the corner functional must be KMS
  const Projection full(diagonal(a, {{1.0, 0.0}, {1.0, 0.0}}));
  const BlockAlgebra corner({1, 1});
  CHECK_NOTHROW(extend_from_corner(Functional(diagonal(corner, {{0.3}, {0.7}})), flow, 1.0, full));
  const Projection full2(diagonal(a, {{1.0, 1.0}, {1.0, 0.0}}));
  const BlockAlgebra corner2({2, 1});
  CHECK_THROWS_AS(extend_from_corner(Functional(diagonal(corner2, {{0.5, 0.4}, {0.1}})), flow, 1.0, full2),
                  Error);
}

TEST_CASE("domination: the central Radon-Nikodym element") {
  const BlockAlgebra a({2, 3});
  const InnerFlow flow = random_flow(a);
  const KmsConeElement psi{flow, 0.4, {2.0, 1.0}};
  const KmsConeElement phi{flow, 0.4, {0.5, 1.0}};
  CHECK(dominated_by(phi.functional(), psi.functional()));
  const AlgElement c = dominated_decomposition(phi, psi);
  CHECK(c.is_central());
  CHECK(max_abs_diff(c, AlgElement::central(a, std::vector<Complex>{0.25, 1.0})) < 1e-14);
  const KmsConeElement big{flow, 0.4, {0.5, 1.5}};
  CHECK_FALSE(dominated_by(big.functional(), psi.functional()));
  CHECK_THROWS_WITH(dominated_decomposition(big, psi), doctest::Contains("block 1"));
}

TEST_CASE("lattice operations on the KMS cone") {
  const BlockAlgebra a({2, 2, 1});
  const InnerFlow flow = random_flow(a);
  const KmsConeElement x{flow, 1.0, {1.0, 0.2, 0.0}};
  const KmsConeElement y{flow, 1.0, {0.5, 0.7, 0.3}};
  const KmsConeElement j = lattice_join(x, y), m = lattice_meet(x, y);
  CHECK(j.coefficients == std::vector<double>{1.0, 0.7, 0.3});
  CHECK(m.coefficients == std::vector<double>{0.5, 0.2, 0.0});
  // x + y = x ∨ y + x ∧ y
  CHECK(max_abs_diff(x.functional().density() + y.functional().density(),
                     j.functional().density() + m.functional().density()) < 1e-14);
  CHECK(dominated_by(m.functional(), x.functional()));
  CHECK(dominated_by(x.functional(), j.functional()));
  CHECK(verify_kms(flow, j.functional().normalized(), 1.0).passed);
  const KmsConeElement z{flow, 2.0, {1.0, 1.0, 1.0}};
  CHECK_THROWS_WITH(lattice_join(x, z), doctest::Contains("mixed beta"));
  // reading a cone element back from its functional
  const KmsConeElement back = cone_element(flow, 1.0, y.functional());
  for (int i = 0; i < 3; ++i) CHECK(back.coefficients[i] == doctest::Approx(y.coefficients[i]));
  CHECK_THROWS_AS(cone_element(flow, 1.0, Functional(random_density(a))), Error);
}
