#include <doctest.h>

#include <cmath>

#include "kmslab/periodic.hpp"
#include "support.hpp"

using namespace kmslab;
using namespace kmslab::testing;

TEST_CASE("minimal period") {
  const BlockAlgebra a({2});
  CHECK(*minimal_period(InnerFlow(diagonal(a, {{0.0, 1.0}}))) == doctest::Approx(2 * M_PI));
  CHECK(*minimal_period(InnerFlow(diagonal(a, {{0.0, 3.0}}))) == doctest::Approx(2 * M_PI / 3));
  const BlockAlgebra b({3});
  CHECK(*minimal_period(InnerFlow(diagonal(b, {{0.0, 2.0, 3.0}}))) == doctest::Approx(2 * M_PI));
  CHECK(*minimal_period(InnerFlow(diagonal(b, {{0.0, 0.5, 1.5}}))) == doctest::Approx(4 * M_PI));
  CHECK_FALSE(minimal_period(InnerFlow(diagonal(b, {{0.0, 1.0, std::sqrt(2.0)}}))).has_value());
  CHECK(*minimal_period(InnerFlow(diagonal(a, {{1.0, 1.0}}))) == 0.0);
}

TEST_CASE("the flow has the detected period") {
  const BlockAlgebra a({3, 2});
  const InnerFlow flow(diagonal(a, {{0.0, 2.0, 5.0}, {1.0, -1.0}}));
  const double p = *minimal_period(flow);
  const AlgElement x = random_element(a);
  CHECK(max_abs_diff(flow.evolve(x, p), x) < 1e-12);
  CHECK(max_abs_diff(flow.evolve(x, p / 2), x) > 1e-3);
}

TEST_CASE("period validation") {
  const BlockAlgebra a({2});
  const InnerFlow flow(diagonal(a, {{0.0, 1.0}}));
  CHECK_NOTHROW(PeriodicFlow(flow, 4 * M_PI));
  CHECK_THROWS_AS(PeriodicFlow(flow, 1.0), Error);
  CHECK_THROWS_AS(PeriodicFlow(flow, -1.0), Error);
}

TEST_CASE("spectral components: degrees, eigen-relation and completeness") {
  const BlockAlgebra a({3});
  const InnerFlow flow(diagonal(a, {{0.0, 1.0, 3.0}}));
  const PeriodicFlow p(flow, 2 * M_PI);
  CHECK(p.occupied_degrees() == std::vector<int>{-3, -2, -1, 0, 1, 2, 3});
  CHECK(p.max_abs_degree() == 3);
  const AlgElement x = random_element(a);
  AlgElement sum = AlgElement::zero(a);
  for (int k : p.occupied_degrees()) {
    const AlgElement q = spectral_component(p, x, k);
    sum += q;
    // σ_t(Q_k) = e^{ikt} Q_k with frequency 1
    CHECK(max_abs_diff(flow.evolve(q, 0.9), std::exp(kI * (0.9 * k)) * q) < 1e-12);
    const AlgElement quad = spectral_component(p, x, k, Method::quadrature);
    CHECK(max_abs_diff(quad, q) < 1e-10);
  }
  CHECK(max_abs_diff(sum, x) < 1e-12);
  CHECK(spectral_component(p, x, 7).max_abs() == 0.0);
}

TEST_CASE("spectral component quadrature error estimate is small for enough nodes") {
  const BlockAlgebra a({2, 2});
  const InnerFlow flow(diagonal(a, {{0.0, 1.0}, {0.0, 2.0}}));
  const PeriodicFlow p(flow, 2 * M_PI);
  const AlgElement x = random_element(a);
  const ComponentQuadrature q = spectral_component_quadrature(p, x, -2, 16);
  CHECK(q.error_estimate < 1e-12);
  CHECK(max_abs_diff(q.value, spectral_component(p, x, -2)) < 1e-12);
}

TEST_CASE("Fejer weights and the (3/4) e12 example") {
  CHECK(fejer_weight(3, 0) == 1.0);
  CHECK(fejer_weight(3, 1) == 0.75);
  CHECK(fejer_weight(3, -4) == 0.0);
  const BlockAlgebra a({2});
  const PeriodicFlow p(InnerFlow(diagonal(a, {{0.0, 1.0}})), 2 * M_PI);
  const AlgElement e12 = AlgElement::matrix_unit(a, 0, 0, 1);
  CHECK(max_abs_diff(fejer_mean(p, e12, 3), 0.75 * e12) < 1e-15);
  CHECK(max_abs_diff(fejer_mean(p, e12, 0), AlgElement::zero(a)) < 1e-15);
}

TEST_CASE("Fejer kernel is nonnegative with peak (N+1)^2") {
  for (int n = 0; n <= 50; n += 7) {
    CHECK(fejer_kernel(n, 0.0) == doctest::Approx((n + 1.0) * (n + 1.0)));
    CHECK(fejer_kernel(n, 2 * M_PI) == doctest::Approx((n + 1.0) * (n + 1.0)));
    double lo = 1.0;
    for (int i = 0; i < 10000; ++i) lo = std::min(lo, fejer_kernel(n, -M_PI + 2 * M_PI * i / 10000.0));
    CHECK(lo >= -1e-9);
  }
}

TEST_CASE("Cesaro means contract the norm") {
  const BlockAlgebra a({3, 2});
  const InnerFlow flow(diagonal(a, {{0.0, 1.0, 4.0}, {2.0, -1.0}}));
  const PeriodicFlow p(flow, *minimal_period(flow));
  for (int rep = 0; rep < 20; ++rep) {
    const AlgElement x = random_element(a);
    const int n = rep % 7;
    CHECK(fejer_mean(p, x, n).operator_norm() <= x.operator_norm() * (1 + 1e-12));
  }
  // means converge to x
  const AlgElement x = random_element(a);
  CHECK(max_abs_diff(fejer_mean(p, x, 4000), x) < 5e-3 * x.max_abs());
}

TEST_CASE("trace scaling exponent of the Gibbs functional") {
  const BlockAlgebra a({2});
  const InnerFlow flow(diagonal(a, {{0.0, 1.0}}));
  const PeriodicFlow p(flow, 2 * M_PI);
  const double beta = 0.8;
  const Functional gibbs(diagonal(a, {{1.0, std::exp(-beta)}}));
  const auto b = trace_scaling_beta(p, gibbs);
  REQUIRE(b.has_value());
  CHECK(std::abs(std::abs(*b) - beta) < 1e-10);
  // the trace scales trivially
  const auto t = trace_scaling_beta(p, tracial_state(a));
  REQUIRE(t.has_value());
  CHECK(std::abs(*t) < 1e-12);
}

TEST_CASE("Cuntz words: relations, trace and scaling") {
  const CuntzWord e{}, w1{{1}}, w2{{2}}, w12{{1, 2}};
  CHECK_THROWS_AS(validate_word(2, CuntzWord{{3}}), Error);
  // V_1* V_1 = 1 and V_1* V_2 = 0
  const auto one = multiply(CuntzMonomial{1, e, w1}, CuntzMonomial{1, w1, e});
  REQUIRE(one.has_value());
  CHECK(one->left.length() == 0);
  CHECK(one->right.length() == 0);
  CHECK_FALSE(multiply(CuntzMonomial{1, e, w1}, CuntzMonomial{1, w2, e}).has_value());
  CHECK(cuntz_trace(2, w12, w12) == Rational(1, 4));
  CHECK(cuntz_trace(2, w12, CuntzWord{{2, 1}}) == 0);
  CHECK(cuntz_trace(3, e, e) == 1);
  CHECK(cuntz_trace(2, CuntzMonomial{1, w1, w2}) == 0);  // degree 0 but a ≠ b
  CHECK(cuntz_trace(2, w12, w1) == 0);  // degree 1: killed by the gauge expectation
  for (int k = 0; k <= 6; ++k) {
    CuntzWord w;
    for (int i = 0; i < k; ++i) w.letters.push_back(1 + i % 2);
    CHECK(cuntz_scaling_ratio(2, w) == Rational(1 << k));
    CHECK(cuntz_scaling_ratio(3, w) == Rational(static_cast<long>(std::pow(3, k))));
  }
  const CuntzMonomial x{Rational(2, 3), w12, w1};
  const CuntzMonomial xs = adjoint(x);
  CHECK(xs.left == w1);
  CHECK(xs.right == w12);
  CHECK(xs.degree() == -1);
}

TEST_CASE("gauge KMS beta") {
  CHECK(gauge_kms_beta(2, 2 * M_PI) == std::log(2.0) / (2 * M_PI));
  CHECK(gauge_kms_beta(3, 1.0) == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(gauge_kms_beta(1, 1.0), Error);
}
