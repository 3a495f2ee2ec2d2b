#include "kmslab/bundle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace kmslab {

namespace {

// -log(p/q) as log q - log p, so that s = 1/7 reports log 7 to the last bit.
double exact_beta(const Rational& s) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  return std::log(denominator(s).convert_to<double>()) - std::log(numerator(s).convert_to<double>()) + 0.0;
}

// Dense linear algebra over an ordered field. Rational arithmetic is exact;
// doubles use a fixed absolute cut on rows normalized to unit max-norm.
template <class S>
struct Field;

template <>
struct Field<Rational> {
  static bool zero(const Rational& x) { return x == 0; }
  static int sign(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }
  static Rational magnitude(const Rational& x) { return abs(x); }
};

template <>
struct Field<double> {
  static constexpr double eps = 1e-9;
  static bool zero(double x) { return std::abs(x) <= eps; }
  static int sign(double x) { return zero(x) ? 0 : (x > 0 ? 1 : -1); }
  static double magnitude(double x) { return std::abs(x); }
};

template <class S>
using Rows = std::vector<std::vector<S>>;

template <class S>
void normalize(std::vector<S>& v) {
  S m = 0;
  for (const S& x : v) m = std::max(m, Field<S>::magnitude(x));
  if (m == 0) return;
  for (S& x : v) x /= m;
}

// Reduced row echelon form; returns pivot columns.
template <class S>
std::vector<int> rref(Rows<S>& m, int cols) {
  if constexpr (std::is_same_v<S, double>)
    for (auto& row : m) normalize(row);
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int c = 0; c < cols && r < m.size(); ++c) {
    std::size_t best = r;
    for (std::size_t i = r; i < m.size(); ++i)
      if (Field<S>::magnitude(m[i][c]) > Field<S>::magnitude(m[best][c])) best = i;
    if (Field<S>::zero(m[best][c])) continue;
    std::swap(m[r], m[best]);
    const S piv = m[r][c];
    for (S& x : m[r]) x /= piv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      const S f = m[i][c];
      for (int k = 0; k < cols; ++k) m[i][k] -= f * m[r][k];
      if constexpr (std::is_same_v<S, double>) m[i][c] = 0.0;
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class S>
int rank_of(Rows<S> m, int cols) {
  return static_cast<int>(rref(m, cols).size());
}

template <class S>
Rows<S> nullspace_basis(Rows<S> m, int cols) {
  const std::vector<int> piv = rref(m, cols);
  std::vector<char> is_pivot(cols, 0);
  for (int p : piv) is_pivot[p] = 1;
  Rows<S> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<S> v(cols, S(0));
    v[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class S>
S dot(const std::vector<S>& a, const std::vector<S>& b) {
  S s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Double description (Motzkin) for {y ∈ S^d : a_i·y ≥ 0}, assumed pointed.
template <class S>
Rows<S> double_description(Rows<S> a, int d) {
  if (d == 0) return {};
  if constexpr (std::is_same_v<S, double>)
    for (auto& row : a) normalize(row);

  // Initial simplicial cone from d independent rows.
  std::vector<int> chosen;
  Rows<S> sel;
  for (std::size_t i = 0; i < a.size() && static_cast<int>(chosen.size()) < d; ++i) {
    sel.push_back(a[i]);
    if (rank_of(sel, d) == static_cast<int>(sel.size())) chosen.push_back(static_cast<int>(i));
    else sel.pop_back();
  }
  require(static_cast<int>(chosen.size()) == d, ErrorCode::numerical, "cone is not pointed");

  // Rays of {B y ≥ 0} are the columns of B^{-1}.
  Rows<S> aug(d, std::vector<S>(2 * d, S(0)));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) aug[i][j] = sel[i][j];
    aug[i][d + i] = 1;
  }
  rref(aug, 2 * d);
  Rows<S> rays;
  for (int j = 0; j < d; ++j) {
    std::vector<S> ray(d);
    for (int i = 0; i < d; ++i) ray[i] = aug[i][d + j];
    if constexpr (std::is_same_v<S, double>) normalize(ray);
    rays.push_back(std::move(ray));
  }

  std::vector<int> processed = chosen;
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    if (std::find(chosen.begin(), chosen.end(), static_cast<int>(idx)) != chosen.end()) continue;
    const std::vector<S>& row = a[idx];
    std::vector<S> val;
    for (const auto& r : rays) val.push_back(dot(row, r));
    Rows<S> next;
    std::vector<std::size_t> plus, minus;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      const int sg = Field<S>::sign(val[k]);
      if (sg >= 0) next.push_back(rays[k]);
      if (sg > 0) plus.push_back(k);
      if (sg < 0) minus.push_back(k);
    }
    for (std::size_t p : plus)
      for (std::size_t n : minus) {
        Rows<S> common;
        for (int i : processed)
          if (Field<S>::zero(dot(a[i], rays[p])) && Field<S>::zero(dot(a[i], rays[n])))
            common.push_back(a[i]);
        if (static_cast<int>(common.size()) < d - 2) continue;
        if (rank_of(common, d) != d - 2) continue;
        std::vector<S> ray(d);
        for (int j = 0; j < d; ++j) ray[j] = val[p] * rays[n][j] - val[n] * rays[p][j];
        normalize(ray);
        next.push_back(std::move(ray));
      }
    rays = std::move(next);
    processed.push_back(static_cast<int>(idx));
  }
  return rays;
}

std::string rational_string(const Rational& q) { return to_string(q); }

struct Candidate {
  SpectrumPoint point;
  Rational exact_s;
};

std::vector<Candidate> eigen_candidates(const DimensionGroupSpec& g) {
  const RealMatrix rt = g.rho_double().transpose();
  Eigen::EigenSolver<RealMatrix> es(rt);
  require(es.info() == Eigen::Success, ErrorCode::numerical, "eigenvalue computation failed");
  std::vector<double> values;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> l = es.eigenvalues()(i);
    if (std::abs(l.imag()) > 1e-9 * std::max(1.0, std::abs(l)) || l.real() <= 0.0) continue;
    values.push_back(l.real());
  }
  std::sort(values.begin(), values.end());
  std::vector<Candidate> out;
  for (double s : values) {
    if (!out.empty() && std::abs(s - out.back().point.s) <= 1e-9 * std::max(1.0, s)) continue;
    Candidate c;
    c.point.s = s;
    c.point.beta = -std::log(s) + 0.0;
    if (const auto q = rationalize(s, 1e-9 * std::max(1.0, s))) {
      const Rational qs = q->exact();
      Rows<Rational> m(g.rank, std::vector<Rational>(g.rank));
      for (int i = 0; i < g.rank; ++i)
        for (int j = 0; j < g.rank; ++j) m[i][j] = g.rho[j][i] - (i == j ? qs : Rational(0));
      if (!nullspace_basis(m, g.rank).empty()) {
        c.point.exact = true;
        c.point.s_exact = rational_string(qs);
        c.point.s = to_double(qs);
        c.point.beta = exact_beta(qs);
        c.exact_s = qs;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

template <class S>
int affine_dimension(const Rows<S>& vertices) {
  if (vertices.empty()) return -1;
  Rows<S> diffs;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    std::vector<S> d(vertices[0].size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = vertices[i][j] - vertices[0][j];
    diffs.push_back(std::move(d));
  }
  return diffs.empty() ? 0 : rank_of(diffs, static_cast<int>(vertices[0].size()));
}

SimplexFiber fiber_at(const DimensionGroupSpec& g, const Candidate& c, double beta) {
  SimplexFiber f;
  f.beta = beta;
  f.eigenvalue = c.point;
  const int r = g.rank;
  if (c.point.exact) {
    Rows<Rational> m(r, std::vector<Rational>(r));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) m[i][j] = g.rho[j][i] - (i == j ? c.exact_s : Rational(0));
    const Rows<Rational> kernel = nullspace_basis(m, r);
    const int d = static_cast<int>(kernel.size());
    Rows<Rational> a(r, std::vector<Rational>(d));
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < d; ++k) a[i][k] = kernel[k][i];
    Rows<Rational> verts;
    for (const auto& y : double_description(a, d)) {
      std::vector<Rational> v(r, Rational(0));
      for (int k = 0; k < d; ++k)
        for (int i = 0; i < r; ++i) v[i] += y[k] * kernel[k][i];
      const Rational norm = dot(v, g.unit);
      for (Rational& x : v) x /= norm;
      verts.push_back(std::move(v));
    }
    std::sort(verts.begin(), verts.end(), std::greater<>());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    f.dimension = affine_dimension(verts);
    for (const auto& v : verts) {
      RealVector dv(r);
      std::vector<std::string> sv;
      for (int i = 0; i < r; ++i) {
        dv(i) = to_double(v[i]);
        sv.push_back(rational_string(v[i]));
      }
      f.vertices.push_back(dv);
      f.exact_vertices.push_back(std::move(sv));
    }
    return f;
  }

  const RealMatrix m = g.rho_double().transpose() - c.point.s * RealMatrix::Identity(r, r);
  Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeFullV);
  const double cut = 1e-9 * std::max(1.0, svd.singularValues()(0));
  std::vector<RealVector> kernel;
  for (int k = 0; k < r; ++k)
    if (svd.singularValues()(k) <= cut) kernel.push_back(svd.matrixV().col(k));
  const int d = static_cast<int>(kernel.size());
  Rows<double> a(r, std::vector<double>(d));
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < d; ++k) a[i][k] = kernel[k](i);
  const RealVector u = g.unit_double();
  Rows<double> verts;
  for (const auto& y : double_description(a, d)) {
    RealVector v = RealVector::Zero(r);
    for (int k = 0; k < d; ++k) v += y[k] * kernel[k];
    v /= v.dot(u);
    for (int i = 0; i < r; ++i)
      if (std::abs(v(i)) < 1e-14) v(i) = 0.0;
    verts.emplace_back(v.data(), v.data() + r);
  }
  std::sort(verts.begin(), verts.end(), std::greater<>());
  f.dimension = affine_dimension(verts);
  for (const auto& v : verts) f.vertices.push_back(Eigen::Map<const RealVector>(v.data(), r));
  return f;
}

}  // namespace

std::vector<std::vector<Rational>> extreme_rays(const std::vector<std::vector<Rational>>& a, int dim) {
  return double_description(a, dim);
}
std::vector<std::vector<double>> extreme_rays(const std::vector<std::vector<double>>& a, int dim) {
  return double_description(a, dim);
}

RealMatrix DimensionGroupSpec::rho_double() const {
  RealMatrix m(rank, rank);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) m(i, j) = to_double(rho[i][j]);
  return m;
}

RealVector DimensionGroupSpec::unit_double() const {
  RealVector u(rank);
  for (int i = 0; i < rank; ++i) u(i) = to_double(unit[i]);
  return u;
}

bool DimensionGroupSpec::is_diagonal() const {
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j)
      if (i != j && rho[i][j] != 0) return false;
  return true;
}

void validate(const DimensionGroupSpec& g) {
  require(g.rank >= 1, ErrorCode::invalid_argument, "rank must be positive");
  require(static_cast<int>(g.rho.size()) == g.rank && static_cast<int>(g.unit.size()) == g.rank,
          ErrorCode::invalid_argument, "rho must be rank x rank and unit of length rank");
  for (const auto& row : g.rho)
    require(static_cast<int>(row.size()) == g.rank, ErrorCode::invalid_argument, "rho must be square");
  require(g.rank <= kMaxDimensionGroupRank, ErrorCode::domain, "vertex enumeration beyond desk scale");
  for (const Rational& x : g.unit) require(x > 0, ErrorCode::invalid_argument, "order unit not strictly positive");
  for (int i = 0; i < g.rank; ++i) {
    bool nonzero = false;
    for (int j = 0; j < g.rank; ++j) {
      require(g.rho[i][j] >= 0, ErrorCode::invalid_argument, "rho does not preserve the strict cone (negative entry)");
      nonzero = nonzero || g.rho[i][j] > 0;
    }
    require(nonzero, ErrorCode::invalid_argument, "rho does not preserve the strict cone (zero row)");
  }
  require(rank_of(g.rho, g.rank) == g.rank, ErrorCode::invalid_argument, "rho is not invertible");
}

std::vector<SpectrumPoint> beta_spectrum(const DimensionGroupSpec& g) {
  validate(g);
  std::vector<SpectrumPoint> out;
  for (const Candidate& c : eigen_candidates(g))
    if (!fiber_at(g, c, c.point.beta).empty()) out.push_back(c.point);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.beta < b.beta; });
  return out;
}

SimplexFiber fiber_simplex(const DimensionGroupSpec& g, double beta) {
  validate(g);
  for (const Candidate& c : eigen_candidates(g))
    if (std::abs(c.point.beta - beta) <= 1e-9 * std::max(1.0, std::abs(beta)))
      return fiber_at(g, c, beta);
  SimplexFiber f;
  f.beta = beta;
  f.eigenvalue.beta = beta;
  f.eigenvalue.s = std::exp(-beta);
  return f;
}

SimplexFiber fiber_simplex_diagonal(const DimensionGroupSpec& g, double beta) {
  validate(g);
  require(g.is_diagonal(), ErrorCode::invalid_argument, "closed form needs diagonal rho");
  SimplexFiber f;
  f.beta = beta;
  std::optional<Rational> s;
  for (int i = 0; i < g.rank; ++i)
    if (std::abs(-std::log(to_double(g.rho[i][i])) - beta) <= 1e-9 * std::max(1.0, std::abs(beta))) {
      s = g.rho[i][i];
      break;
    }
  if (!s) return f;
  f.eigenvalue = {exact_beta(*s), to_double(*s), true, to_string(*s)};
  for (int i = 0; i < g.rank; ++i) {
    if (g.rho[i][i] != *s) continue;
    RealVector v = RealVector::Zero(g.rank);
    std::vector<std::string> sv(g.rank, "0");
    const Rational x = Rational(1) / g.unit[i];
    v(i) = to_double(x);
    sv[i] = to_string(x);
    f.vertices.push_back(v);
    f.exact_vertices.push_back(std::move(sv));
  }
  f.dimension = static_cast<int>(f.vertices.size()) - 1;
  return f;
}

// ---------------------------------------------------------------------------

PointBundleSpec point_bundle_from_plane(const std::vector<std::pair<double, double>>& points,
                                        bool imaginary_part) {
  PointBundleSpec spec;
  for (const auto& [x, y] : points) {
    std::ostringstream os;
    os.precision(17);
    os << x << (y < 0 ? "-" : "+") << std::abs(y) << "i";
    spec.points.push_back({os.str(), imaginary_part ? y : x});
  }
  return spec;
}

PointFiber bundle_from_points(const PointBundleSpec& spec, double t, double tol) {
  PointFiber f;
  f.t = t;
  for (std::size_t i = 0; i < spec.points.size(); ++i) {
    require(std::isfinite(spec.points[i].level), ErrorCode::invalid_argument, "level map must be finite");
    if (std::abs(spec.points[i].level - t) <= tol * std::max(1.0, std::abs(t)))
      f.atoms.push_back(static_cast<int>(i));
  }
  return f;
}

// ---------------------------------------------------------------------------

ScalingMeasure ScalingMeasure::atomic(double lambda, double beta, double x, int truncation) {
  require(lambda > 1.0, ErrorCode::invalid_argument, "scaling factor must exceed 1");
  require(x != 0.0, ErrorCode::invalid_argument, "atomic scaling measure needs x != 0");
  require(truncation >= 0, ErrorCode::invalid_argument, "truncation must be nonnegative");
  ScalingMeasure m;
  m.lambda = lambda;
  m.beta = beta;
  if (beta == 0.0) return m;
  m.kind = Kind::atomic;
  m.x = x;
  m.truncation = truncation;
  return m;
}

ScalingMeasure ScalingMeasure::density(double lambda, double beta) {
  require(lambda > 1.0, ErrorCode::invalid_argument, "scaling factor must exceed 1");
  require(beta <= 0.0, ErrorCode::domain, "no nonzero scaling density for beta > 0");
  ScalingMeasure m;
  m.lambda = lambda;
  m.beta = beta;
  if (beta == 0.0) return m;
  m.kind = Kind::density;
  m.alpha = -beta / std::log(lambda) - 1.0;
  return m;
}

std::string ScalingMeasure::kind_name() const {
  switch (kind) {
    case Kind::dirac_zero: return "dirac_zero";
    case Kind::atomic: return "atomic";
    case Kind::density: return "density";
  }
  return "?";
}

namespace {

bool in_interval(double p, const TestSet& b) {
  const double slack = 1e-12 * std::max(std::abs(b.lo), std::abs(b.hi));
  return p >= b.lo - slack && p <= b.hi + slack;
}

double atom(const ScalingMeasure& mu, int k) { return std::pow(mu.lambda, -k) * mu.x; }

// Orbit indices k (untruncated) with λ^{-k}x ∈ B; nullopt if infinitely many.
std::optional<std::pair<long, long>> orbit_range(const ScalingMeasure& mu, const TestSet& b) {
  if (b.lo <= 0.0 && b.hi >= 0.0) return std::nullopt;
  if ((b.lo > 0) != (mu.x > 0)) return std::pair<long, long>{1, 0};
  const double lo = std::min(std::abs(b.lo), std::abs(b.hi));
  const double hi = std::max(std::abs(b.lo), std::abs(b.hi));
  const double ll = std::log(mu.lambda), ax = std::abs(mu.x);
  const long kmin = static_cast<long>(std::ceil(std::log(ax / hi) / ll - 1e-9));
  const long kmax = static_cast<long>(std::floor(std::log(ax / lo) / ll + 1e-9));
  return std::pair<long, long>{kmin, kmax};
}

bool in_window(const ScalingMeasure& mu, const TestSet& b) {
  if (mu.kind != ScalingMeasure::Kind::atomic) return true;
  const auto range = orbit_range(mu, b);
  if (!range) return false;
  if (range->first > range->second) return true;
  return range->first - 1 >= -mu.truncation && range->second <= mu.truncation;
}

double antiderivative(double alpha, double t) {
  if (alpha == -1.0) return std::log(t);
  return std::pow(t, alpha + 1.0) / (alpha + 1.0);
}

}  // namespace

double measure_of(const ScalingMeasure& mu, const TestSet& b) {
  require(b.lo <= b.hi, ErrorCode::invalid_argument, "test set with lo > hi");
  switch (mu.kind) {
    case ScalingMeasure::Kind::dirac_zero: return (b.lo <= 0.0 && b.hi >= 0.0) ? 1.0 : 0.0;
    case ScalingMeasure::Kind::atomic: {
      double total = 0.0;
      for (int k = -mu.truncation; k <= mu.truncation; ++k)
        if (in_interval(atom(mu, k), b)) total += std::exp(k * mu.beta);
      return total;
    }
    case ScalingMeasure::Kind::density: {
      const double a = std::max(b.lo, 0.0), c = std::max(b.hi, 0.0);
      if (c <= a) return 0.0;
      const double fa = a == 0.0 ? 0.0 : antiderivative(mu.alpha, a);
      return antiderivative(mu.alpha, c) - fa;
    }
  }
  return 0.0;
}

ScalingReport verify_scaling(const ScalingMeasure& mu, const std::vector<TestSet>& sets) {
  ScalingReport rep;
  for (const TestSet& b : sets) {
    ScalingCheck c{b, in_window(mu, b), 0.0};
    if (!c.in_window) {
      ++rep.outside_window;
    } else {
      const double scaled = measure_of(mu, {mu.lambda * b.lo, mu.lambda * b.hi});
      const double base = measure_of(mu, b);
      c.residual = std::abs(scaled - std::exp(-mu.beta) * base) / std::max(1.0, scaled);
      rep.max_residual = std::max(rep.max_residual, c.residual);
    }
    rep.checks.push_back(c);
  }
  return rep;
}

Rational verify_scaling_exact(const ScalingMeasure& mu, const std::vector<TestSet>& sets) {
  require(mu.kind == ScalingMeasure::Kind::atomic, ErrorCode::invalid_argument,
          "exact verification is for atomic measures");
  Rational worst = 0;
  for (const TestSet& b : sets) {
    if (!in_window(mu, b)) continue;
    std::map<int, BigInt> coeff;  // exponent of q
    const TestSet scaled{mu.lambda * b.lo, mu.lambda * b.hi};
    for (int k = -mu.truncation; k <= mu.truncation; ++k) {
      if (in_interval(atom(mu, k), scaled)) coeff[k] += 1;
      if (in_interval(atom(mu, k), b)) coeff[k - 1] -= 1;
    }
    for (const auto& [e, c] : coeff) worst = std::max(worst, Rational(abs(c)));
  }
  return worst;
}

// ---------------------------------------------------------------------------

KmsBundle kms_bundle_fd(const InnerFlow& flow, std::vector<double> beta_grid, int threads) {
  require(!beta_grid.empty(), ErrorCode::invalid_argument, "empty beta grid");
  std::sort(beta_grid.begin(), beta_grid.end());
  beta_grid.erase(std::unique(beta_grid.begin(), beta_grid.end()), beta_grid.end());
  std::vector<std::optional<KmsSimplex>> simplices(beta_grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < beta_grid.size(); i = next++) simplices[i] = kms_simplex(flow, beta_grid[i]);
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(beta_grid.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  KmsBundle out;
  const int m = flow.algebra().num_blocks();
  const double c = 2.0 * flow.spectral_radius();
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    out.fibers.push_back({beta_grid[i], std::move(*simplices[i])});
    if (out.fibers.back().simplex.dimension() != m - 1) out.certificate.all_fibers_full = false;
  }
  for (std::size_t i = 1; i < out.fibers.size(); ++i) {
    const double db = out.fibers[i].beta - out.fibers[i - 1].beta;
    for (int v = 0; v < m; ++v) {
      const double diff = (out.fibers[i].simplex.vertices[v].functional.density() -
                           out.fibers[i - 1].simplex.vertices[v].functional.density())
                              .frobenius_norm();
      const double allowed = c * db;
      if (diff > allowed + 1e-12) out.certificate.continuous = false;
      if (allowed > 0) out.certificate.max_lipschitz_ratio = std::max(out.certificate.max_lipschitz_ratio, diff / allowed);
    }
  }
  return out;
}

}  // namespace kmslab
