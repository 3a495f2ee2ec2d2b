#include "kmslab/products.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kmslab/rational.hpp"

namespace kmslab {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

long checked_power(int m, int k) {
  require(k >= 1, ErrorCode::invalid_argument, "truncation level must be at least 1");
  require(m >= 1, ErrorCode::invalid_argument, "site dimension must be positive");
  long dim = 1;
  for (int i = 0; i < k; ++i) {
    dim *= m;
    require(dim <= kMaxTensorDim, ErrorCode::domain, "m^k exceeds the 4096 memory guard");
  }
  return dim;
}

void check_site(const ItpfiSpec& spec) {
  require(spec.site_generator.rows() == spec.site_generator.cols() && spec.site_generator.rows() > 0,
          ErrorCode::invalid_argument, "site generator must be square");
  require(hermiticity_defect(spec.site_generator) <= 1e-10, ErrorCode::invalid_argument,
          "site generator not Hermitian");
}

}  // namespace

Matrix tensor_generator(const ItpfiSpec& spec, int k) {
  check_site(spec);
  const int m = spec.site_dim();
  const long dim = checked_power(m, k);
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 0; i < k; ++i) {
    Matrix term = Matrix::Identity(1, 1);
    for (int j = 0; j < k; ++j)
      term = kron(term, j == i ? spec.site_generator : Matrix::Identity(m, m));
    h += term;
  }
  return h;
}

KmsState product_kms_state(const ItpfiSpec& spec, double beta, int k) {
  check_site(spec);
  const int m = spec.site_dim();
  checked_power(m, k);
  const BlockAlgebra site({m});
  const KmsState s = gibbs(InnerFlow(AlgElement(site, {spec.site_generator})), beta);
  Matrix rho = Matrix::Identity(1, 1);
  for (int i = 0; i < k; ++i) rho = kron(rho, s.functional.density().block(0));
  const BlockAlgebra full({static_cast<int>(rho.rows())});
  InnerFlow flow(AlgElement(full, {tensor_generator(spec, k)}));
  return {Functional(AlgElement(full, {std::move(rho)})), beta, std::move(flow)};
}

Matrix partial_trace_last(const Matrix& density, int m) {
  require(m > 0 && density.rows() % m == 0, ErrorCode::invalid_argument,
          "dimension not divisible by the traced factor");
  const Eigen::Index n = density.rows() / m;
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (int s = 0; s < m; ++s) out(i, j) += density(i * m + s, j * m + s);
  return out;
}

// ---------------------------------------------------------------------------

double matroid_factor(const MatroidTerm& t, double beta) {
  require(t.h.rows() == t.h.cols() && t.p.rows() == t.h.rows(), ErrorCode::invalid_argument,
          "matroid term: h and p must be square of equal size");
  require(hermiticity_defect(t.h) <= 1e-10, ErrorCode::invalid_argument, "matroid term: h not Hermitian");
  require((t.p * t.p - t.p).cwiseAbs().maxCoeff() <= 1e-10 && hermiticity_defect(t.p) <= 1e-10,
          ErrorCode::invalid_argument, "matroid term: p not a projection");
  require((t.h * t.p - t.p * t.h).cwiseAbs().maxCoeff() <= 1e-10, ErrorCode::invalid_argument,
          "matroid term: h does not commute with p");
  require(t.p.trace().real() > 0.5, ErrorCode::invalid_argument, "matroid term: p = 0");
  const HermitianEigen e = hermitian_eigen(t.h);
  const double shift = beta >= 0 ? e.values.minCoeff() : e.values.maxCoeff();
  const Matrix boltz = e.apply([&](double l) { return Complex(std::exp(-beta * (l - shift))); });
  return boltz.trace().real() / (boltz * t.p).trace().real();
}

namespace {

long adic_level(int base, long j) {
  long l = 1, bound = base;
  while (j >= bound) {
    ++l;
    bound *= base;
  }
  return l;
}

}  // namespace

double family_term(MatroidFamily f, int base, long j, double beta) {
  switch (f) {
    case MatroidFamily::base_adic: {
      require(base >= 2 && j >= 1, ErrorCode::invalid_argument, "base-adic family needs base ≥ 2, j ≥ 1");
      const double l = static_cast<double>(adic_level(base, j));
      return 1.0 / (1.0 + std::exp(beta * (l - 1.0)));
    }
    case MatroidFamily::factorial: {
      require(j >= 2, ErrorCode::invalid_argument, "factorial family starts at j = 2");
      const double lf = std::lgamma(static_cast<double>(j) + 1.0);
      // (j!)^β / (j! - 1)
      return std::exp((beta - 1.0) * lf) / -std::expm1(-lf);
    }
  }
  fail(ErrorCode::invalid_argument, "unknown matroid family");
}

MatroidTerm family_matrices(MatroidFamily f, int base, long j) {
  switch (f) {
    case MatroidFamily::base_adic: {
      const double mu = -static_cast<double>(adic_level(base, j) - 1);
      Matrix h = Matrix::Zero(3, 3), p = Matrix::Zero(3, 3);
      h(0, 0) = mu;
      p(0, 0) = p(1, 1) = 1.0;
      return {h, p};
    }
    case MatroidFamily::factorial: {
      require(j >= 2 && j <= 6, ErrorCode::domain, "factorial family matrices only for 2 ≤ j ≤ 6");
      long n = 1;
      for (long i = 2; i <= j; ++i) n *= i;
      Matrix p = Matrix::Identity(n, n);
      p(n - 1, n - 1) = 0.0;
      const Matrix h = -std::log(static_cast<double>(n)) * (Matrix::Identity(n, n) - p);
      return {h, p};
    }
  }
  fail(ErrorCode::invalid_argument, "unknown matroid family");
}

MatroidVerdict matroid_bounded(const MatroidSpec& spec, double beta) {
  MatroidVerdict v;
  for (const MatroidTerm& t : spec.prefix) {
    const double f = matroid_factor(t, beta);
    v.partial_product *= f;
    v.partial_sum += f - 1.0;
  }
  if (!spec.tail) {
    v.verdict = Boundedness::inconclusive;
    v.reason = "no tail family declared; a finite prefix cannot decide a tail property";
    return v;
  }
  std::ostringstream os;
  switch (*spec.tail) {
    case MatroidFamily::base_adic: {
      require(spec.base >= 2, ErrorCode::invalid_argument, "base-adic family needs base ≥ 2");
      const double threshold = std::log(static_cast<double>(spec.base));
      v.verdict = beta > threshold ? Boundedness::bounded : Boundedness::unbounded;
      os << "sum_l " << spec.base << "^(l-1)/(1+e^(beta(l-1))) converges iff beta > log " << spec.base;
      break;
    }
    case MatroidFamily::factorial:
      v.verdict = beta < 1.0 ? Boundedness::bounded : Boundedness::unbounded;
      os << "sum_j (j!)^beta/(j!-1) converges iff beta < 1";
      break;
  }
  v.reason = os.str();
  return v;
}

std::string to_string(Boundedness b) {
  switch (b) {
    case Boundedness::bounded: return "bounded";
    case Boundedness::unbounded: return "unbounded";
    case Boundedness::inconclusive: return "inconclusive";
  }
  return "?";
}

// ---------------------------------------------------------------------------

DifferenceGroupReport difference_group(const Matrix& h, double tol) {
  require(h.rows() == h.cols() && h.rows() > 0, ErrorCode::invalid_argument, "generator must be square");
  require(hermiticity_defect(h) <= 1e-10, ErrorCode::invalid_argument, "generator not Hermitian");
  const RealVector lam = hermitian_eigen(h).values;
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  DifferenceGroupReport rep;
  rep.tolerance = tol;
  for (Eigen::Index i = 1; i < lam.size(); ++i) {
    const double d = lam(i) - lam(0);
    if (d <= tol * scale) continue;
    if (!rep.generators.empty() && d - rep.generators.back() <= tol * scale) continue;
    rep.generators.push_back(d);
  }
  if (rep.generators.empty()) return rep;

  const double d0 = rep.generators.front();
  std::vector<Fraction> ratios;
  for (double d : rep.generators) {
    const double x = d / d0;
    const auto q = rationalize(x, tol * std::max(1.0, x));
    if (!q) {
      rep.kind = GroupKind::dense;
      rep.witness = {d0, d};
      return rep;
    }
    ratios.push_back(*q);
  }
  rep.kind = GroupKind::cyclic;
  rep.kappa = d0 * fraction_gcd(ratios).value();
  return rep;
}

FactorType factor_type_itpfi(const ItpfiSpec& spec, double beta, double tol) {
  check_site(spec);
  const DifferenceGroupReport g = difference_group(spec.site_generator, tol);
  if (g.kind == GroupKind::trivial) return {"trivial_flow", 0.0};
  if (beta == 0.0) return {"beta_zero", 0.0};
  if (g.kind == GroupKind::dense) return {"III_1", 1.0};
  return {"III_lambda", std::exp(-std::abs(beta) * g.kappa)};
}

GammaInvariant gamma_invariant(const ItpfiSpec& spec, double beta, double tol) {
  check_site(spec);
  const DifferenceGroupReport g = difference_group(spec.site_generator, tol);
  if (beta == 0.0 || g.kind == GroupKind::trivial) return {"zero", 0.0};
  if (g.kind == GroupKind::dense) return {"real_line", 0.0};
  return {"cyclic", std::abs(beta) * g.kappa};
}

std::string to_string(GroupKind k) {
  switch (k) {
    case GroupKind::trivial: return "trivial";
    case GroupKind::cyclic: return "cyclic";
    case GroupKind::dense: return "dense";
  }
  return "?";
}

// ---------------------------------------------------------------------------

SpectrumFamily SpectrumFamily::power(double r) {
  require(r >= 0.0 && std::isfinite(r), ErrorCode::invalid_argument, "power family needs r ≥ 0");
  SpectrumFamily f;
  f.tag = Tag::power;
  f.r = r;
  return f;
}

SpectrumFamily SpectrumFamily::power_log(double r) {
  require(r > 0.0 && std::isfinite(r), ErrorCode::invalid_argument, "power_log family needs r > 0");
  SpectrumFamily f;
  f.tag = Tag::power_log;
  f.r = r;
  return f;
}

SpectrumFamily SpectrumFamily::negated(SpectrumFamily inner) {
  SpectrumFamily f;
  f.tag = Tag::negated;
  f.inner = std::make_shared<const SpectrumFamily>(std::move(inner));
  return f;
}

SpectrumFamily SpectrumFamily::explicit_values(std::vector<double> values) {
  SpectrumFamily f;
  f.tag = Tag::explicit_prefix;
  f.prefix = std::move(values);
  return f;
}

double family_eigenvalue(const SpectrumFamily& f, long n) {
  require(n >= 1, ErrorCode::invalid_argument, "eigenvalue index starts at 1");
  const double x = static_cast<double>(n);
  switch (f.tag) {
    case SpectrumFamily::Tag::zero: return 0.0;
    case SpectrumFamily::Tag::power: return f.r == 0.0 ? x : std::log(x) / f.r;
    case SpectrumFamily::Tag::power_log: {
      const double l = std::log(x + 2.0);
      return std::log(x * l * l) / f.r;
    }
    case SpectrumFamily::Tag::negated: return -family_eigenvalue(*f.inner, n);
    case SpectrumFamily::Tag::explicit_prefix:
      require(static_cast<std::size_t>(n) <= f.prefix.size(), ErrorCode::domain,
              "index beyond the explicit prefix");
      return f.prefix[static_cast<std::size_t>(n - 1)];
  }
  return 0.0;
}

bool Window::contains(double beta) const {
  if (empty) return false;
  const bool lo = lower_closed ? beta >= lower : beta > lower;
  const bool hi = upper_closed ? beta <= upper : beta < upper;
  return lo && hi;
}

std::string Window::to_string() const {
  if (empty) return "empty";
  auto num = [](double x) {
    if (std::isinf(x)) return std::string(x > 0 ? "inf" : "-inf");
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  };
  return (lower_closed ? "[" : "(") + num(lower) + ", " + num(upper) + (upper_closed ? "]" : ")");
}

Window trace_class_window(const SpectrumFamily& f) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (f.tag) {
    case SpectrumFamily::Tag::zero: return {};
    case SpectrumFamily::Tag::power: return {false, f.r, inf, false, false};
    case SpectrumFamily::Tag::power_log: return {false, f.r, inf, true, false};
    case SpectrumFamily::Tag::negated: {
      const Window w = trace_class_window(*f.inner);
      if (w.empty) return w;
      return {false, -w.upper, -w.lower, w.upper_closed, w.lower_closed};
    }
    case SpectrumFamily::Tag::explicit_prefix:
      fail(ErrorCode::domain, "window undecidable from finite data");
  }
  return {};
}

}  // namespace kmslab
