#pragma once

// Simplex bundles: β-spectra and fibers of dimension groups with an order
// automorphism, bundles from level maps on point sets, scaling measures on ℝ
// and the bundle β ↦ S_β of a finite-dimensional flow.

#include <optional>
#include <string>
#include <vector>

#include "kmslab/kms.hpp"
#include "kmslab/rational.hpp"

namespace kmslab {

inline constexpr int kMaxDimensionGroupRank = 12;

// (ℚ^r, strict cone), automorphism ρ and order unit u.
struct DimensionGroupSpec {
  int rank = 0;
  std::vector<std::vector<Rational>> rho;
  std::vector<Rational> unit;

  RealMatrix rho_double() const;
  RealVector unit_double() const;
  bool is_diagonal() const;
};

// Throws unless ρ is invertible and maps strictly positive vectors to strictly
// positive vectors and u is strictly positive. For the strict cone the
// positivity condition is exactly: ρ ≥ 0 entrywise with no zero row.
void validate(const DimensionGroupSpec& g);

struct SpectrumPoint {
  double beta = 0.0;
  double s = 1.0;            // e^{-β}
  bool exact = false;        // s recognized and certified as a rational eigenvalue
  std::string s_exact;       // "p/q" when exact
};

struct SimplexFiber {
  double beta = 0.0;
  SpectrumPoint eigenvalue;
  std::vector<RealVector> vertices;          // c ≥ 0 with cᵀρ = e^{-β}cᵀ, ⟨c,u⟩ = 1
  std::vector<std::vector<std::string>> exact_vertices;  // rational coordinates when exact
  int dimension = -1;                        // affine dimension; -1 when empty

  bool empty() const { return vertices.empty(); }
  bool is_simplex() const { return static_cast<int>(vertices.size()) == dimension + 1; }
};

std::vector<SpectrumPoint> beta_spectrum(const DimensionGroupSpec& g);
SimplexFiber fiber_simplex(const DimensionGroupSpec& g, double beta);
// Closed form for diagonal ρ: coordinate functionals on {i : ρ_ii = e^{-β}}, normalized by u.
SimplexFiber fiber_simplex_diagonal(const DimensionGroupSpec& g, double beta);

// Extreme rays of the pointed cone {y : A y ≥ 0} (rows of A), exact.
std::vector<std::vector<Rational>> extreme_rays(const std::vector<std::vector<Rational>>& a, int dim);
std::vector<std::vector<double>> extreme_rays(const std::vector<std::vector<double>>& a, int dim);

// --- point bundles ----------------------------------------------------------

struct LabelledPoint {
  std::string label;
  double level = 0.0;
};

struct PointBundleSpec {
  std::vector<LabelledPoint> points;
};

// Points of ℝ² labelled by coordinates with level f = Re (x) or Im (y).
PointBundleSpec point_bundle_from_plane(const std::vector<std::pair<double, double>>& points,
                                        bool imaginary_part = false);

struct PointFiber {
  double t = 0.0;
  std::vector<int> atoms;  // indices of points at level t; vertices are their Dirac masses
  int dimension() const { return static_cast<int>(atoms.size()) - 1; }
};

PointFiber bundle_from_points(const PointBundleSpec& spec, double t, double tol = kDefaultTol);

// --- scaling measures -------------------------------------------------------

struct ScalingMeasure {
  enum class Kind { dirac_zero, atomic, density } kind = Kind::dirac_zero;
  double lambda = 2.0;
  double beta = 0.0;
  double x = 1.0;       // atomic base point
  int truncation = 0;   // atomic |k| ≤ K
  double alpha = -1.0;  // density exponent

  // Σ e^{kβ} δ_{λ^{-k}x}, |k| ≤ K; β = 0 collapses to δ₀.
  static ScalingMeasure atomic(double lambda, double beta, double x, int truncation);
  // t^α dt on (0,∞) with α = -β/log λ - 1; β = 0 collapses to δ₀, β > 0 is refused.
  static ScalingMeasure density(double lambda, double beta);

  std::string kind_name() const;
};

struct TestSet {
  double lo = 0.0, hi = 0.0;  // closed interval; lo == hi is an atom
};

struct ScalingCheck {
  TestSet set;
  bool in_window = true;
  double residual = 0.0;  // |μ(λB) - e^{-β}μ(B)| / max(1, μ(λB))
};

struct ScalingReport {
  double max_residual = 0.0;
  int outside_window = 0;
  std::vector<ScalingCheck> checks;
};

double measure_of(const ScalingMeasure& mu, const TestSet& b);
ScalingReport verify_scaling(const ScalingMeasure& mu, const std::vector<TestSet>& sets);
// Atomic case in exact arithmetic: coefficients of μ(λB) - q^{-1}μ(B) as a
// Laurent polynomial in q = e^β. Returns max |coefficient| over in-window sets.
Rational verify_scaling_exact(const ScalingMeasure& mu, const std::vector<TestSet>& sets);

// --- finite-dimensional KMS bundle ------------------------------------------

struct BundleFiber {
  double beta;
  KmsSimplex simplex;
};

struct BundleCertificate {
  bool all_fibers_full = true;          // each fiber an (m-1)-simplex
  bool continuous = true;               // ∥ρ_i(β') - ρ_i(β)∥_F ≤ 2∥h∥|β' - β|
  double max_lipschitz_ratio = 0.0;     // observed / allowed
};

struct KmsBundle {
  std::vector<BundleFiber> fibers;  // ordered by β
  BundleCertificate certificate;
};

KmsBundle kms_bundle_fd(const InnerFlow& flow, std::vector<double> beta_grid, int threads = 1);

}  // namespace kmslab
