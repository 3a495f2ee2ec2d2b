#pragma once

// Infinite tensor products of factors (stationary case) at finite truncation,
// matroid boundedness criteria, eigenvalue-difference groups, factor types and
// Γ-invariants, and trace-class windows of unbounded generators.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmslab/kms.hpp"

namespace kmslab {

struct ItpfiSpec {
  Matrix site_generator;  // h on M_m
  int site_dim() const { return static_cast<int>(site_generator.rows()); }
};

inline constexpr long kMaxTensorDim = 4096;

// Σ_i 1⊗…⊗h⊗…⊗1 on M_{m^k}.
Matrix tensor_generator(const ItpfiSpec& spec, int k);
// The k-fold tensor power of the site Gibbs state.
KmsState product_kms_state(const ItpfiSpec& spec, double beta, int k);
// Trace out the last tensor factor of dimension m.
Matrix partial_trace_last(const Matrix& density, int m);

// --- matroid flows --------------------------------------------------------

struct MatroidTerm {
  Matrix h;
  Matrix p;  // projection commuting with h
};

enum class MatroidFamily {
  // n_j = 3, h_j = μ_j e_j with e_j ≤ p_j minimal, Tr p_j = 2, μ_j = -(l-1) for b^{l-1} ≤ j < b^l
  base_adic,
  // n_j = j!, Tr p_j = j! - 1, h_j = -log(j!)(1 - p_j), j ≥ 2
  factorial,
};

struct MatroidSpec {
  std::vector<MatroidTerm> prefix;
  std::optional<MatroidFamily> tail;
  int base = 7;  // for base_adic
};

enum class Boundedness { bounded, unbounded, inconclusive };

struct MatroidVerdict {
  Boundedness verdict = Boundedness::inconclusive;
  double partial_product = 1.0;  // over the explicit prefix
  double partial_sum = 0.0;      // Σ a_j; Σa ≤ Π(1+a) ≤ exp Σa
  std::string reason;
};

// Tr(e^{-βh})/Tr(e^{-βh}p) for one term.
double matroid_factor(const MatroidTerm& t, double beta);
// The term a_j = factor - 1 of a built-in family, from its closed form.
double family_term(MatroidFamily f, int base, long j, double beta);
// Explicit matrices of term j (only feasible for small n_j).
MatroidTerm family_matrices(MatroidFamily f, int base, long j);

MatroidVerdict matroid_bounded(const MatroidSpec& spec, double beta);

std::string to_string(Boundedness b);

// --- difference groups, factor type, Γ ------------------------------------

enum class GroupKind { trivial, cyclic, dense };

struct DifferenceGroupReport {
  GroupKind kind = GroupKind::trivial;
  double kappa = 0.0;                     // generator when cyclic
  std::pair<double, double> witness{0, 0};  // differences with irrational ratio when dense
  double tolerance = 0.0;
  std::vector<double> generators;         // λ_i - λ_min, nonzero
};

DifferenceGroupReport difference_group(const Matrix& h, double tol = kDefaultTol);

struct FactorType {
  std::string tag;     // trivial_flow | beta_zero | III_1 | III_lambda
  double lambda = 0.0; // for III_lambda
};

FactorType factor_type_itpfi(const ItpfiSpec& spec, double beta, double tol = kDefaultTol);

struct GammaInvariant {
  std::string tag;  // zero | cyclic | real_line
  double generator = 0.0;
};

GammaInvariant gamma_invariant(const ItpfiSpec& spec, double beta, double tol = kDefaultTol);

std::string to_string(GroupKind k);

// --- trace-class windows --------------------------------------------------

struct SpectrumFamily {
  enum class Tag { zero, power, power_log, negated, explicit_prefix } tag = Tag::zero;
  double r = 0.0;
  std::shared_ptr<const SpectrumFamily> inner;  // for negated
  std::vector<double> prefix;                   // for explicit_prefix

  static SpectrumFamily zero() { return {}; }
  static SpectrumFamily power(double r);
  static SpectrumFamily power_log(double r);
  static SpectrumFamily negated(SpectrumFamily f);
  static SpectrumFamily explicit_values(std::vector<double> values);
};

// n-th eigenvalue (n ≥ 1) of the positive generator.
double family_eigenvalue(const SpectrumFamily& f, long n);

// Set of β with Σ e^{-βa_n} < ∞; an interval or empty.
struct Window {
  bool empty = true;
  double lower = 0.0, upper = 0.0;  // ±infinity allowed
  bool lower_closed = false, upper_closed = false;

  bool contains(double beta) const;
  std::string to_string() const;
};

Window trace_class_window(const SpectrumFamily& f);

}  // namespace kmslab
