#include <doctest.h>

#include "kmslab/algebra.hpp"
#include "support.hpp"

using namespace kmslab;
using namespace kmslab::testing;

TEST_CASE("block algebra dimensions and offsets") {
  const BlockAlgebra a({2, 3});
  CHECK(a.num_blocks() == 2);
  CHECK(a.total_dimension() == 13);
  CHECK(a.representation_dimension() == 5);
  CHECK(a.flat_offset(1) == 4);
  CHECK_FALSE(a.is_abelian());
  CHECK(BlockAlgebra({1, 1, 1}).is_abelian());
  CHECK_THROWS_AS(BlockAlgebra({}), Error);
  CHECK_THROWS_AS(BlockAlgebra({2, 0}), Error);
}

TEST_CASE("matrix units multiply as e_ij e_kl = delta_jk e_il") {
  const BlockAlgebra a({3});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const AlgElement p = AlgElement::matrix_unit(a, 0, i, j) * AlgElement::matrix_unit(a, 0, k, l);
          const AlgElement expect = j == k ? AlgElement::matrix_unit(a, 0, i, l) : AlgElement::zero(a);
          CHECK(max_abs_diff(p, expect) == 0.0);
        }
}

TEST_CASE("different blocks annihilate each other") {
  const BlockAlgebra a({2, 2});
  const AlgElement x = AlgElement::matrix_unit(a, 0, 0, 1);
  const AlgElement y = AlgElement::matrix_unit(a, 1, 1, 0);
  CHECK((x * y).max_abs() == 0.0);
}

TEST_CASE("flatten and from_flat are inverse") {
  const BlockAlgebra a({2, 3, 1});
  for (int rep = 0; rep < 10; ++rep) {
    const AlgElement x = random_element(a);
    CHECK(max_abs_diff(AlgElement::from_flat(a, x.flatten()), x) == 0.0);
  }
}

TEST_CASE("adjoint is an involutive antimultiplicative map") {
  const BlockAlgebra a({2, 3});
  for (int rep = 0; rep < 10; ++rep) {
    const AlgElement x = random_element(a), y = random_element(a);
    CHECK(max_abs_diff(x.adjoint().adjoint(), x) == 0.0);
    CHECK(max_abs_diff((x * y).adjoint(), y.adjoint() * x.adjoint()) < 1e-12);
  }
}

TEST_CASE("operator norm of a block sum is the max over blocks") {
  const BlockAlgebra a({1, 1});
  const AlgElement x = diagonal(a, {{2.0}, {-3.0}});
  CHECK(x.operator_norm() == doctest::Approx(3.0));
  CHECK(x.trace().real() == doctest::Approx(-1.0));
}

TEST_CASE("central elements") {
  const BlockAlgebra a({2, 3});
  const std::vector<Complex> c{2.0, -1.0};
  const AlgElement z = AlgElement::central(a, c);
  CHECK(z.is_central());
  for (int rep = 0; rep < 5; ++rep) CHECK(commutator(z, random_element(a)).max_abs() < 1e-14);
  CHECK_FALSE(AlgElement::matrix_unit(a, 1, 0, 2).is_central());
}

TEST_CASE("functional calculus agrees with direct powers") {
  const BlockAlgebra a({3, 2});
  const AlgElement h = random_hermitian_element(a);
  const AlgElement cube = functional_calculus(h, [](double x) { return x * x * x; });
  CHECK(max_abs_diff(cube, h * h * h) < 1e-12);
}

TEST_CASE("positivity") {
  const BlockAlgebra a({2});
  CHECK(is_positive(diagonal(a, {{1.0, 0.0}})));
  CHECK_FALSE(is_positive(diagonal(a, {{1.0, -0.1}})));
  CHECK_THROWS_WITH(is_positive(AlgElement::matrix_unit(a, 0, 0, 1)), doctest::Contains("self-adjoint"));
}

TEST_CASE("functionals: evaluation, masses, faithfulness") {
  const BlockAlgebra a({2, 1});
  const Functional phi(diagonal(a, {{0.5, 0.25}, {0.25}}));
  CHECK(phi.is_state());
  CHECK(phi.is_faithful());
  CHECK(phi.block_masses()[0] == doctest::Approx(0.75));
  CHECK(phi(AlgElement::matrix_unit(a, 0, 1, 1)).real() == doctest::Approx(0.25));
  CHECK(phi.scaled(2.0).mass() == doctest::Approx(2.0));
  CHECK(phi.scaled(2.0).normalized().mass() == doctest::Approx(1.0));

  const Functional vertex(diagonal(a, {{1.0, 0.0}, {0.0}}));
  CHECK_FALSE(vertex.is_faithful());
  CHECK_THROWS_AS(Functional(diagonal(a, {{1.0, -0.5}, {0.0}})), Error);
}

TEST_CASE("tracial state is a trace and a random state is not") {
  const BlockAlgebra a({2, 3});
  const Functional tau = tracial_state(a);
  CHECK(is_trace(tau));
  CHECK(tau.mass() == doctest::Approx(1.0));
  CHECK_FALSE(is_trace(Functional(random_density(a))));
}

TEST_CASE("projections") {
  const BlockAlgebra a({2, 2});
  const Projection p(diagonal(a, {{1.0, 0.0}, {0.0, 1.0}}));
  CHECK(p.is_full());
  CHECK(p.block_ranks() == std::vector<int>{1, 1});
  CHECK_FALSE(Projection(diagonal(a, {{1.0, 1.0}, {0.0, 0.0}})).is_full());
  CHECK_THROWS_AS(Projection(diagonal(a, {{0.5, 0.0}, {0.0, 0.0}})), Error);
  CHECK(center_projections(a).size() == 2);
}

TEST_CASE("commutant of a full matrix algebra is the scalars") {
  const int n = 3;
  std::vector<Matrix> gens;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      gens.push_back(e);
    }
  CHECK(commutant_basis(gens, n).size() == 1);
  // a diagonal matrix with distinct entries: commutant = diagonal matrices
  Matrix d = Matrix::Zero(n, n);
  d.diagonal() << 1.0, 2.0, 3.0;
  const std::vector<Matrix> one{d};
  CHECK(commutant_basis(one, n).size() == 3);
}
