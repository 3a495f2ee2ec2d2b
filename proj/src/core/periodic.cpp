#include "kmslab/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace kmslab {

namespace {

std::vector<double> nonzero_gaps(const InnerFlow& flow, double tol) {
  std::vector<double> gaps;
  for (const auto& e : flow.eigendata())
    for (Eigen::Index j = 0; j < e.values.size(); ++j)
      for (Eigen::Index k = j + 1; k < e.values.size(); ++k) {
        const double d = std::abs(e.values(k) - e.values(j));
        if (d > tol) gaps.push_back(d);
      }
  return gaps;
}

}  // namespace

std::optional<double> minimal_period(const InnerFlow& flow, double tol) {
  const std::vector<double> gaps = nonzero_gaps(flow, tol);
  if (gaps.empty()) return 0.0;
  const double base = *std::min_element(gaps.begin(), gaps.end());
  std::vector<Fraction> ratios;
  for (double g : gaps) {
    auto r = rationalize(g / base, tol);
    if (!r) return std::nullopt;
    ratios.push_back(*r);
  }
  const Fraction g = fraction_gcd(ratios);
  const double kappa = base * g.value();
  return 2.0 * M_PI / kappa;
}

PeriodicFlow::PeriodicFlow(InnerFlow flow, double period, double tol)
    : flow_(std::move(flow)), period_(period) {
  require(period > 0.0, ErrorCode::invalid_argument, "period must be positive");
  for (const auto& e : flow_.eigendata()) {
    const Eigen::Index n = e.values.size();
    Eigen::MatrixXi deg(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        const double x = (e.values(j) - e.values(k)) * period / (2.0 * M_PI);
        const double r = std::round(x);
        if (std::abs(x - r) > tol * std::max(1.0, std::abs(x))) {
          std::ostringstream os;
          os << "flow is not " << period << "-periodic: gap degree " << x << " is not an integer";
          fail(ErrorCode::domain, os.str());
        }
        deg(j, k) = static_cast<int>(r);
      }
    degrees_.push_back(std::move(deg));
  }
}

int PeriodicFlow::degree(int block, int j, int k) const {
  return degrees_.at(static_cast<std::size_t>(block))(j, k);
}

std::vector<int> PeriodicFlow::occupied_degrees() const {
  std::set<int> s;
  for (const auto& d : degrees_)
    for (Eigen::Index i = 0; i < d.size(); ++i) s.insert(d.data()[i]);
  return {s.begin(), s.end()};
}

int PeriodicFlow::max_abs_degree() const {
  int m = 0;
  for (const auto& d : degrees_)
    if (d.size() > 0) m = std::max(m, d.cwiseAbs().maxCoeff());
  return m;
}

AlgElement spectral_component(const PeriodicFlow& p, const AlgElement& a, int k, Method method) {
  if (method == Method::quadrature) {
    const int nodes = std::max(64, 4 * (p.max_abs_degree() + std::abs(k) + 1));
    ComponentQuadrature q = spectral_component_quadrature(p, a, k, nodes);
    if (!(q.error_estimate <= 1e-8)) {
      std::ostringstream os;
      os << "spectral component quadrature error estimate " << q.error_estimate;
      fail(ErrorCode::numerical, os.str());
    }
    return std::move(q.value);
  }
  AlgElement e = p.flow().to_eigenbasis(a);
  for (int b = 0; b < e.num_blocks(); ++b) {
    Matrix& m = e.block(b);
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      for (Eigen::Index l = 0; l < m.cols(); ++l)
        if (p.degree(b, static_cast<int>(j), static_cast<int>(l)) != k) m(j, l) = 0.0;
  }
  return p.flow().from_eigenbasis(e);
}

ComponentQuadrature spectral_component_quadrature(const PeriodicFlow& p, const AlgElement& a,
                                                  int k, int nodes) {
  require(nodes >= 1, ErrorCode::invalid_argument, "need at least one quadrature node");
  auto rule = [&](int m) {
    AlgElement acc = AlgElement::zero(a.algebra());
    const double h = p.period() / m;
    for (int i = 0; i < m; ++i) {
      const double t = i * h;
      acc += std::exp(-kI * (t * k * p.frequency())) * p.flow().evolve(a, t);
    }
    acc *= 1.0 / m;
    return acc;
  };
  AlgElement coarse = rule(nodes);
  const AlgElement fine = rule(2 * nodes);
  const double scale = std::max({fine.frobenius_norm(), a.frobenius_norm(), 1e-300});
  const double error = (coarse - fine).frobenius_norm() / scale;
  return {std::move(coarse), error};
}

double fejer_weight(int n_terms, int k) {
  return std::max(0.0, 1.0 - std::abs(k) / static_cast<double>(n_terms + 1));
}

AlgElement fejer_mean(const PeriodicFlow& p, const AlgElement& a, int n_terms) {
  require(n_terms >= 0, ErrorCode::invalid_argument, "Cesàro index must be nonnegative");
  AlgElement e = p.flow().to_eigenbasis(a);
  for (int b = 0; b < e.num_blocks(); ++b) {
    Matrix& m = e.block(b);
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      for (Eigen::Index l = 0; l < m.cols(); ++l)
        m(j, l) *= fejer_weight(n_terms, p.degree(b, static_cast<int>(j), static_cast<int>(l)));
  }
  return p.flow().from_eigenbasis(e);
}

double fejer_kernel(int n_terms, double x) {
  require(n_terms >= 0, ErrorCode::invalid_argument, "Fejér index must be nonnegative");
  const double y = std::remainder(x, 2.0 * M_PI);  // in [-π, π]
  const double n1 = n_terms + 1.0;
  if (std::abs(y) < 1e-4) {
    // Σ_{|k|≤N} (N+1−|k|) cos(ky), exact near the removable singularity
    double s = n1;
    for (int k = 1; k <= n_terms; ++k) s += 2.0 * (n1 - k) * std::cos(k * y);
    return s;
  }
  const double num = std::sin(0.5 * n1 * y);
  const double den = std::sin(0.5 * y);
  return (num * num) / (den * den);
}

std::optional<double> trace_scaling_beta(const PeriodicFlow& p, const Functional& tau, double tol) {
  require_same_algebra(p.flow().algebra(), tau.algebra());
  const AlgElement d = p.flow().to_eigenbasis(tau.density());
  // τ(e'_{jl} e'_{mn}) = δ_lm d'_{nj} in the eigenbasis units.
  for (int b = 0; b < d.num_blocks(); ++b) {
    const Matrix& m = d.block(b);
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index l = 0; l < n; ++l) {
        if (p.degree(b, int(j), int(l)) != 0) continue;
        for (Eigen::Index r = 0; r < n; ++r)
          for (Eigen::Index s = 0; s < n; ++s) {
            if (p.degree(b, int(r), int(s)) != 0) continue;
            const Complex xy = (l == r) ? m(s, j) : Complex(0.0);
            const Complex yx = (s == j) ? m(l, r) : Complex(0.0);
            require(std::abs(xy - yx) <= tol * std::max(1.0, m.cwiseAbs().maxCoeff()),
                    ErrorCode::domain, "functional is not a trace on the fixed-point algebra");
          }
      }
  }
  std::optional<double> beta;
  for (int b = 0; b < d.num_blocks(); ++b) {
    const Matrix& m = d.block(b);
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index l = 0; l < n; ++l) {
        const int k = p.degree(b, int(j), int(l));
        if (k == 0) continue;
        // a = e'_{jl}: a*a = e'_{ll}, aa* = e'_{jj}
        const double num = m(l, l).real();
        const double den = m(j, j).real();
        if (den <= 1e-300 || num <= 1e-300) fail(ErrorCode::domain, "degenerate functional");
        const double bk = std::log(num / den) * p.period() / (2.0 * M_PI * k);
        if (!beta) {
          beta = bk;
        } else if (std::abs(*beta - bk) > tol * std::max(1.0, std::abs(bk))) {
          return std::nullopt;
        }
      }
  }
  return beta;
}

// ---------------------------------------------------------------------------

void validate_word(int m, const CuntzWord& w) {
  require(m >= 2, ErrorCode::invalid_argument, "Cuntz algebra needs m >= 2");
  for (int c : w.letters)
    require(c >= 1 && c <= m, ErrorCode::invalid_argument, "Cuntz word letter out of range");
}

CuntzMonomial adjoint(const CuntzMonomial& x) { return {x.coefficient, x.right, x.left}; }

namespace {

bool is_prefix(const std::vector<int>& p, const std::vector<int>& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

}  // namespace

std::optional<CuntzMonomial> multiply(const CuntzMonomial& x, const CuntzMonomial& y) {
  // (V_a V_b*)(V_c V_d*): V_b* V_c = V_{c'} if c = b c', V_{b'}* if b = c b', else 0
  const auto& b = x.right.letters;
  const auto& c = y.left.letters;
  CuntzMonomial out;
  out.coefficient = x.coefficient * y.coefficient;
  if (is_prefix(b, c)) {
    out.left.letters = x.left.letters;
    out.left.letters.insert(out.left.letters.end(), c.begin() + static_cast<long>(b.size()), c.end());
    out.right = y.right;
    return out;
  }
  if (is_prefix(c, b)) {
    out.left = x.left;
    out.right.letters = y.right.letters;
    out.right.letters.insert(out.right.letters.end(), b.begin() + static_cast<long>(c.size()), b.end());
    return out;
  }
  return std::nullopt;
}

Rational cuntz_trace(int m, const CuntzWord& a, const CuntzWord& b) {
  validate_word(m, a);
  validate_word(m, b);
  if (!(a == b)) return Rational(0);
  BigInt den = 1;
  for (std::size_t i = 0; i < a.length(); ++i) den *= m;
  return Rational(BigInt(1), den);
}

Rational cuntz_trace(int m, const CuntzMonomial& x) {
  return x.coefficient * cuntz_trace(m, x.left, x.right);
}

Rational cuntz_scaling_ratio(int m, const CuntzWord& a) {
  const CuntzMonomial v{Rational(1), a, CuntzWord{}};
  const auto vstar_v = multiply(adjoint(v), v);  // = 1
  const auto v_vstar = multiply(v, adjoint(v));  // = V_a V_a*
  require(vstar_v && v_vstar, ErrorCode::numerical, "isometry relation failed");
  return cuntz_trace(m, *vstar_v) / cuntz_trace(m, *v_vstar);
}

double gauge_kms_beta(int m, double rho) {
  require(m >= 2, ErrorCode::invalid_argument, "Cuntz algebra needs m >= 2");
  if (rho == 0.0) fail(ErrorCode::domain, "no KMS state for trivial-period gauge flow");
  // e^{kρβ} = τ(V_a*V_a)/τ(V_aV_a*) on a degree-one word
  const Rational ratio = cuntz_scaling_ratio(m, CuntzWord{{1}});
  const int k = 1;
  return std::log(to_double(ratio)) / (k * rho);
}

}  // namespace kmslab
