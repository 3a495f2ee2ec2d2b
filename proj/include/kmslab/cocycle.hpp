#pragma once

// Normalized 2-cocycles ℝ×ℝ → 𝕋 sampled on a grid kδ, |kδ| ≤ R, their
// coboundaries, and a grid transcription of the proof that every such cocycle
// is a coboundary.

#include <functional>
#include <vector>

#include "kmslab/linalg.hpp"

namespace kmslab {

class CocycleGrid {
 public:
  CocycleGrid(double step, double half_range);

  double step() const { return step_; }
  double half_range() const { return half_range_; }
  int half_points() const { return k_; }  // K = R/δ
  int side() const { return 2 * k_ + 1; }

  // Indices i, j ∈ [-K, K].
  Complex at(int i, int j) const { return values_[index(i, j)]; }
  void set(int i, int j, Complex v);
  bool defined(int i, int j) const { return mask_[index(i, j)] != 0; }
  void undefine(int i, int j) { mask_[index(i, j)] = 0; }

  static CocycleGrid from_function(double step, double half_range,
                                   const std::function<Complex(double, double)>& f);

 private:
  std::size_t index(int i, int j) const;
  double step_, half_range_;
  int k_;
  std::vector<Complex> values_;
  std::vector<char> mask_;
};

class Cochain {
 public:
  Cochain(double step, double half_range);

  double step() const { return step_; }
  double half_range() const { return half_range_; }
  int half_points() const { return k_; }

  Complex at(int i) const { return values_[static_cast<std::size_t>(i + k_)]; }
  void set(int i, Complex v) { values_[static_cast<std::size_t>(i + k_)] = v; }

  static Cochain from_function(double step, double half_range, const std::function<Complex(double)>& f);

 private:
  double step_, half_range_;
  int k_;
  std::vector<Complex> values_;
};

struct CocycleCheck {
  double cocycle_residual = 0.0;
  double normalization_residual = 0.0;
  double modulus_residual = 0.0;
  long triples_checked = 0;
  bool sampled = false;     // triples sampled rather than exhaustive
  int worst[3] = {0, 0, 0};
};

// Exhaustive over in-range triples up to max_triples, seeded sampling beyond.
CocycleCheck check_cocycle(const CocycleGrid& lambda, long max_triples = 200'000'000,
                           unsigned long long seed = 0);

// λ_μ(s,t) = μ(s)μ(t)conj(μ(s+t)); entries with s+t off the grid are undefined.
CocycleGrid coboundary_of(const Cochain& mu);

struct TrivializeResult {
  Cochain mu;                 // μ_total
  double residual = 0.0;      // max |λ - ∂μ_total| over defined entries
  double epsilon = 1.0;       // rescaling of step (a)
  int period_points = 0;      // P = ε/δ
  double stage_b_residual = 0.0;  // max |λ¹(nP, r) - 1|
  double stage_d_residual = 0.0;  // max |λ² - 1| on [0, ε/2]²
  double final_residual = 0.0;    // max |λ⁴ - 1|
  long undefined_entries = 0;
};

TrivializeResult trivialize(const CocycleGrid& lambda);

// Off-grid accuracy of μ as a trivializer of the continuum cocycle λ: μ is
// extended to cell midpoints by linear interpolation of its phase (after
// removing the character fixed by the first grid increment) and compared with λ
// at midpoint pairs whose sum is a grid point. Every stride-th pair is used.
double interpolation_residual(const Cochain& mu, const std::function<Complex(double, double)>& lambda,
                              int stride = 1);

// max over the grid of |∂a - ∂b|, i.e. equality up to a character.
double coboundary_distance(const Cochain& a, const Cochain& b);

}  // namespace kmslab
