#include <doctest.h>

#include <cmath>

#include "kmslab/products.hpp"
#include "support.hpp"

using namespace kmslab;
using namespace kmslab::testing;

namespace {

Matrix diag_matrix(std::initializer_list<double> xs) {
  Matrix m = Matrix::Zero(Eigen::Index(xs.size()), Eigen::Index(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) m(i, i) = x, ++i;
  return m;
}

}  // namespace

TEST_CASE("tensor generator and product Gibbs states") {
  const ItpfiSpec spec{diag_matrix({0.0, std::log(2.0)})};
  const Matrix h2 = tensor_generator(spec, 2);
  CHECK(h2.rows() == 4);
  CHECK(std::abs(h2(3, 3) - 2 * std::log(2.0)) < 1e-15);
  const KmsState s = product_kms_state(spec, 1.0, 2);
  const double expect[] = {4.0 / 9, 2.0 / 9, 2.0 / 9, 1.0 / 9};
  for (int i = 0; i < 4; ++i) CHECK(s.functional.density().block(0)(i, i).real() == doctest::Approx(expect[i]));
  CHECK(verify_kms(s.flow, s.functional, 1.0).passed);
  CHECK_THROWS_AS(tensor_generator(spec, 13), Error);  // 2^13 > 4096
}

TEST_CASE("product states are compatible under partial trace") {
  const ItpfiSpec spec{random_hermitian(3, 1.5)};
  for (int k = 2; k <= 4; ++k) {
    const Matrix big = product_kms_state(spec, 0.7, k).functional.density().block(0);
    const Matrix small = product_kms_state(spec, 0.7, k - 1).functional.density().block(0);
    CHECK((partial_trace_last(big, 3) - small).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("matroid family terms agree with the explicit matrices") {
  for (long j = 1; j <= 60; j += 7)
    for (double beta : {0.3, 1.0, 2.5}) {
      const MatroidTerm t = family_matrices(MatroidFamily::base_adic, 7, j);
      CHECK(matroid_factor(t, beta) - 1 == doctest::Approx(family_term(MatroidFamily::base_adic, 7, j, beta)).epsilon(1e-12));
    }
  for (long j = 2; j <= 5; ++j)
    for (double beta : {0.3, 0.9, 1.4}) {
      const MatroidTerm t = family_matrices(MatroidFamily::factorial, 7, j);
      CHECK(t.h.rows() == static_cast<long>(std::tgamma(j + 1.0) + 0.5));
      CHECK(matroid_factor(t, beta) - 1 == doctest::Approx(family_term(MatroidFamily::factorial, 7, j, beta)).epsilon(1e-12));
    }
  CHECK_THROWS_AS(family_matrices(MatroidFamily::factorial, 7, 9), Error);
}

TEST_CASE("seven-adic and factorial verdicts") {
  MatroidSpec seven;
  seven.tail = MatroidFamily::base_adic;
  const double l7 = std::log(7.0);
  CHECK(matroid_bounded(seven, l7 - 0.05).verdict == Boundedness::unbounded);
  CHECK(matroid_bounded(seven, l7).verdict == Boundedness::unbounded);
  CHECK(matroid_bounded(seven, l7 + 0.05).verdict == Boundedness::bounded);
  MatroidSpec three = seven;
  three.base = 3;
  CHECK(matroid_bounded(three, std::log(3.0) + 0.01).verdict == Boundedness::bounded);
  CHECK(matroid_bounded(three, std::log(3.0) - 0.01).verdict == Boundedness::unbounded);
  MatroidSpec fact;
  fact.tail = MatroidFamily::factorial;
  CHECK(matroid_bounded(fact, 0.5).verdict == Boundedness::bounded);
  CHECK(matroid_bounded(fact, 1.0).verdict == Boundedness::unbounded);
  CHECK(matroid_bounded(fact, 1.5).verdict == Boundedness::unbounded);
  CHECK(to_string(Boundedness::inconclusive) == "inconclusive");
}

TEST_CASE("a finite prefix cannot decide boundedness but enters the partial product") {
  MatroidSpec spec;
  spec.prefix.push_back({diag_matrix({0.0, 1.0}), diag_matrix({1.0, 0.0})});
  const MatroidVerdict v = matroid_bounded(spec, 1.0);
  CHECK(v.verdict == Boundedness::inconclusive);
  CHECK(v.partial_product == doctest::Approx(1.0 + std::exp(-1.0)));
  spec.prefix.push_back({diag_matrix({0.0, 1.0}), diag_matrix({1.0, 1.0})});
  CHECK(matroid_bounded(spec, 1.0).partial_product == doctest::Approx(1.0 + std::exp(-1.0)));
  spec.tail = MatroidFamily::factorial;
  CHECK(matroid_bounded(spec, 0.5).verdict == Boundedness::bounded);
  // p must commute with h
  MatroidSpec bad;
  Matrix p = Matrix::Constant(2, 2, 0.5);
  bad.prefix.push_back({diag_matrix({0.0, 1.0}), p});
  CHECK_THROWS_AS(matroid_bounded(bad, 1.0), Error);
}

TEST_CASE("difference groups") {
  DifferenceGroupReport r = difference_group(diag_matrix({0.0, std::log(2.0)}));
  CHECK(r.kind == GroupKind::cyclic);
  CHECK(r.kappa == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  r = difference_group(diag_matrix({0.0, 1.0, std::sqrt(2.0)}));
  CHECK(r.kind == GroupKind::dense);
  CHECK(r.witness.first == doctest::Approx(1.0));
  CHECK(r.witness.second == doctest::Approx(std::sqrt(2.0)));
  CHECK(difference_group(diag_matrix({1.5, 1.5})).kind == GroupKind::trivial);
  r = difference_group(diag_matrix({0.0, 0.4, 1.0}));
  CHECK(r.kind == GroupKind::cyclic);
  CHECK(r.kappa == doctest::Approx(0.2));
  // every difference is an integer multiple of kappa
  for (double d : r.generators) CHECK(std::abs(d / r.kappa - std::round(d / r.kappa)) < 1e-9);
  // denominators beyond the cap count as irrational
  CHECK(difference_group(diag_matrix({0.0, 1.0, 1.0 + 1.0 / 1000003.0})).kind == GroupKind::dense);
}

TEST_CASE("difference group is stable under scaling") {
  for (int rep = 0; rep < 20; ++rep) {
    const double c = uniform(0.2, 5.0) * (rep % 2 ? -1 : 1);
    const Matrix h = diag_matrix({0.0, 0.5, 1.5, 2.0});
    const DifferenceGroupReport a = difference_group(h), b = difference_group(c * h);
    CHECK(b.kind == a.kind);
    CHECK(b.kappa == doctest::Approx(std::abs(c) * a.kappa).epsilon(1e-9));
    const Matrix g = diag_matrix({0.0, 1.0, std::sqrt(3.0)});
    CHECK(difference_group(c * g).kind == GroupKind::dense);
  }
  // invariance under unitary conjugation
  const Matrix u = hermitian_eigen(random_hermitian(3)).vectors;
  const Matrix h = diag_matrix({0.0, 0.5, 1.5});
  CHECK(difference_group(u * h * u.adjoint()).kappa == doctest::Approx(0.5));
}

TEST_CASE("factor types and Gamma") {
  const ItpfiSpec log2{diag_matrix({0.0, std::log(2.0)})};
  FactorType t = factor_type_itpfi(log2, 1.0);
  CHECK(t.tag == "III_lambda");
  CHECK(t.lambda == doctest::Approx(0.5).epsilon(1e-14));
  GammaInvariant g = gamma_invariant(log2, 1.0);
  CHECK(g.tag == "cyclic");
  CHECK(g.generator == doctest::Approx(std::log(2.0)));
  for (double beta = -3.0; beta <= 3.0; beta += 0.25) {
    if (beta == 0.0) continue;
    CHECK(std::abs(factor_type_itpfi(log2, beta).lambda - std::exp(-std::abs(beta) * std::log(2.0))) <= 1e-12);
    CHECK(gamma_invariant(log2, beta).generator == doctest::Approx(std::abs(beta) * std::log(2.0)));
  }
  CHECK(factor_type_itpfi(log2, 0.0).tag == "beta_zero");
  CHECK(gamma_invariant(log2, 0.0).tag == "zero");
  const ItpfiSpec irr{diag_matrix({0.0, 1.0, std::sqrt(2.0)})};
  CHECK(factor_type_itpfi(irr, 1.0).tag == "III_1");
  CHECK(gamma_invariant(irr, 1.0).tag == "real_line");
  const ItpfiSpec triv{diag_matrix({2.0, 2.0})};
  CHECK(factor_type_itpfi(triv, 1.0).tag == "trivial_flow");
  CHECK(gamma_invariant(triv, 1.0).tag == "zero");
}

TEST_CASE("trace-class windows") {
  CHECK(trace_class_window(SpectrumFamily::zero()).empty);
  Window w = trace_class_window(SpectrumFamily::power(2.0));
  CHECK_FALSE(w.empty);
  CHECK(w.lower == 2.0);
  CHECK_FALSE(w.lower_closed);
  CHECK(std::isinf(w.upper));
  CHECK(w.to_string() == "(2, inf)");
  CHECK_FALSE(w.contains(2.0));
  CHECK(w.contains(2.1));
  w = trace_class_window(SpectrumFamily::power_log(1.5));
  CHECK(w.lower_closed);
  CHECK(w.contains(1.5));
  CHECK_FALSE(w.contains(1.49));
  w = trace_class_window(SpectrumFamily::power(0.0));
  CHECK(w.to_string() == "(0, inf)");
  w = trace_class_window(SpectrumFamily::negated(SpectrumFamily::power(2.0)));
  CHECK(w.to_string() == "(-inf, -2)");
  CHECK(w.contains(-3.0));
  CHECK_THROWS_WITH(trace_class_window(SpectrumFamily::explicit_values({1, 2, 3})),
                    doctest::Contains("undecidable"));
}

TEST_CASE("family eigenvalues") {
  CHECK(family_eigenvalue(SpectrumFamily::power(2.0), 1) == 0.0);
  CHECK(family_eigenvalue(SpectrumFamily::power(2.0), 9) == doctest::Approx(std::log(9.0) / 2));
  CHECK(family_eigenvalue(SpectrumFamily::power(0.0), 5) == 5.0);
  CHECK(family_eigenvalue(SpectrumFamily::negated(SpectrumFamily::power(0.0)), 5) == -5.0);
  CHECK(family_eigenvalue(SpectrumFamily::explicit_values({3, 1}), 2) == 1.0);
  CHECK_THROWS_AS(family_eigenvalue(SpectrumFamily::explicit_values({3, 1}), 3), Error);
  CHECK_THROWS_AS(family_eigenvalue(SpectrumFamily::zero(), 0), Error);
  // power_log eigenvalues grow monotonically
  const SpectrumFamily f = SpectrumFamily::power_log(1.0);
  for (long n = 1; n < 50; ++n) CHECK(family_eigenvalue(f, n + 1) > family_eigenvalue(f, n));
}
