#pragma once

// Seeded random inputs shared by the unit tests.

#include <cstdint>
#include <random>
#include <vector>

#include "kmslab/algebra.hpp"
#include "kmslab/flow.hpp"

namespace kmslab::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20261016);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Complex gaussian_complex() {
  std::normal_distribution<double> n;
  return {n(rng()), n(rng())};
}

inline Matrix random_matrix(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gaussian_complex();
  return m;
}

// Hermitian with operator norm exactly `scale`.
inline Matrix random_hermitian(int n, double scale = 1.0) {
  Matrix m = random_matrix(n);
  m = (m + m.adjoint()).eval() * 0.5;
  const double norm = operator_norm(m);
  return norm > 0 ? Matrix(m * (scale / norm)) : m;
}

inline AlgElement random_element(const BlockAlgebra& a) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < a.num_blocks(); ++b) blocks.push_back(random_matrix(a.block_dim(b)));
  return AlgElement(a, std::move(blocks));
}

inline AlgElement random_hermitian_element(const BlockAlgebra& a, double scale = 1.0) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < a.num_blocks(); ++b) blocks.push_back(random_hermitian(a.block_dim(b), scale));
  return AlgElement(a, std::move(blocks));
}

inline InnerFlow random_flow(const BlockAlgebra& a, double scale = 1.0) {
  return InnerFlow(random_hermitian_element(a, scale));
}

// Strictly positive density of trace one.
inline AlgElement random_density(const BlockAlgebra& a) {
  std::vector<Matrix> blocks;
  for (int b = 0; b < a.num_blocks(); ++b) {
    const int n = a.block_dim(b);
    Matrix x = random_matrix(n);
    blocks.push_back(x * x.adjoint() + Matrix::Identity(n, n) * 0.1);
  }
  AlgElement d(a, std::move(blocks));
  return (1.0 / d.trace().real()) * d;
}

inline AlgElement diagonal(const BlockAlgebra& a, const std::vector<std::vector<double>>& entries) {
  std::vector<Matrix> blocks;
  for (const auto& e : entries) {
    Matrix m = Matrix::Zero(Eigen::Index(e.size()), Eigen::Index(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) m(Eigen::Index(i), Eigen::Index(i)) = e[i];
    blocks.push_back(m);
  }
  return AlgElement(a, std::move(blocks));
}

inline double max_abs_diff(const AlgElement& x, const AlgElement& y) { return (x - y).max_abs(); }

}  // namespace kmslab::testing
