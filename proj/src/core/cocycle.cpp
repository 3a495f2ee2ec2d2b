#include "kmslab/cocycle.hpp"

#include <cmath>
#include <random>

#include "kmslab/error.hpp"

namespace kmslab {

namespace {

constexpr int kMaxHalfPoints = 1024;
constexpr long kSampledTriples = 4'000'000;

int half_points_of(double step, double half_range) {
  require(step > 0.0 && std::isfinite(step), ErrorCode::invalid_argument, "grid step must be positive");
  require(half_range >= step && std::isfinite(half_range), ErrorCode::invalid_argument,
          "half range must be at least one step");
  const double k = half_range / step;
  const long kr = std::lround(k);
  require(std::abs(k - static_cast<double>(kr)) <= 1e-9 * k, ErrorCode::invalid_argument,
          "half range must be a multiple of the step");
  require(kr <= kMaxHalfPoints, ErrorCode::domain, "grid larger than 2049 points per axis");
  return static_cast<int>(kr);
}

Complex unit(Complex z) { return z / std::abs(z); }

Complex boundary(const Cochain& mu, int i, int j) {
  return mu.at(i) * mu.at(j) * std::conj(mu.at(i + j));
}

// μ(nP + r) = μ(nP)λ(nP, r), μ((n+1)P) = μ(nP)λ(nP, P).
Cochain step_recursion(const CocycleGrid& lambda, int p) {
  const int k = lambda.half_points();
  Cochain mu(lambda.step(), lambda.half_range());
  const int nmax = k / p;
  std::vector<Complex> at_period(2 * nmax + 1);
  at_period[nmax] = 1.0;
  for (int n = 0; n < nmax; ++n) at_period[nmax + n + 1] = unit(at_period[nmax + n] * lambda.at(n * p, p));
  for (int n = -1; n >= -nmax; --n) at_period[nmax + n] = unit(at_period[nmax + n + 1] / lambda.at(n * p, p));
  for (int n = -nmax; n <= nmax; ++n)
    for (int r = 0; r < p && n * p + r <= k; ++r)
      mu.set(n * p + r, unit(at_period[nmax + n] * lambda.at(n * p, r)));
  return mu;
}

// λ·∂μ, entries with |i+j| > K left undefined.
CocycleGrid twist(const CocycleGrid& lambda, const Cochain& mu, bool conjugate) {
  const int k = lambda.half_points();
  CocycleGrid out(lambda.step(), lambda.half_range());
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) {
      if (!lambda.defined(i, j) || std::abs(i + j) > k) {
        out.undefine(i, j);
        continue;
      }
      const Complex b = boundary(mu, i, j);
      out.set(i, j, unit(lambda.at(i, j) * (conjugate ? std::conj(b) : b)));
    }
  return out;
}

}  // namespace

CocycleGrid::CocycleGrid(double step, double half_range)
    : step_(step), half_range_(half_range), k_(half_points_of(step, half_range)) {
  const std::size_t n = static_cast<std::size_t>(side()) * static_cast<std::size_t>(side());
  values_.assign(n, Complex(1.0));
  mask_.assign(n, 1);
}

std::size_t CocycleGrid::index(int i, int j) const {
  require(std::abs(i) <= k_ && std::abs(j) <= k_, ErrorCode::invalid_argument, "grid index out of range");
  return static_cast<std::size_t>(i + k_) * static_cast<std::size_t>(side()) + static_cast<std::size_t>(j + k_);
}

void CocycleGrid::set(int i, int j, Complex v) {
  const std::size_t idx = index(i, j);
  values_[idx] = v;
  mask_[idx] = 1;
}

CocycleGrid CocycleGrid::from_function(double step, double half_range,
                                       const std::function<Complex(double, double)>& f) {
  CocycleGrid g(step, half_range);
  const int k = g.half_points();
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) g.set(i, j, f(i * step, j * step));
  return g;
}

Cochain::Cochain(double step, double half_range)
    : step_(step), half_range_(half_range), k_(half_points_of(step, half_range)),
      values_(static_cast<std::size_t>(2 * k_ + 1), Complex(1.0)) {}

Cochain Cochain::from_function(double step, double half_range, const std::function<Complex(double)>& f) {
  Cochain c(step, half_range);
  for (int i = -c.k_; i <= c.k_; ++i) c.set(i, f(i * step));
  return c;
}

CocycleCheck check_cocycle(const CocycleGrid& lambda, long max_triples, unsigned long long seed) {
  const int k = lambda.half_points();
  CocycleCheck c;
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) {
      if (!lambda.defined(i, j)) continue;
      c.modulus_residual = std::max(c.modulus_residual, std::abs(std::abs(lambda.at(i, j)) - 1.0));
    }
  for (int t = -k; t <= k; ++t) {
    if (lambda.defined(0, t)) c.normalization_residual = std::max(c.normalization_residual, std::abs(lambda.at(0, t) - 1.0));
    if (lambda.defined(t, 0)) c.normalization_residual = std::max(c.normalization_residual, std::abs(lambda.at(t, 0) - 1.0));
  }

  auto visit = [&](int s, int t, int u) {
    if (std::abs(s + t) > k || std::abs(t + u) > k) return;
    if (!lambda.defined(s, t) || !lambda.defined(s + t, u) || !lambda.defined(t, u) || !lambda.defined(s, t + u))
      return;
    const double r = std::abs(lambda.at(s, t) * lambda.at(s + t, u) - lambda.at(t, u) * lambda.at(s, t + u));
    ++c.triples_checked;
    if (r > c.cocycle_residual) {
      c.cocycle_residual = r;
      c.worst[0] = s;
      c.worst[1] = t;
      c.worst[2] = u;
    }
  };
  const long side = 2L * k + 1;
  if (side * side * side <= max_triples) {
    for (int s = -k; s <= k; ++s)
      for (int t = -k; t <= k; ++t)
        for (int u = -k; u <= k; ++u) visit(s, t, u);
  } else {
    c.sampled = true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(-k, k);
    for (long n = 0; n < kSampledTriples; ++n) {
      const int s = d(rng), t = d(rng), u = d(rng);
      visit(s, t, u);
    }
  }
  return c;
}

CocycleGrid coboundary_of(const Cochain& mu) {
  const int k = mu.half_points();
  CocycleGrid out(mu.step(), mu.half_range());
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) {
      if (std::abs(i + j) > k) out.undefine(i, j);
      else out.set(i, j, boundary(mu, i, j));
    }
  return out;
}

TrivializeResult trivialize(const CocycleGrid& lambda) {
  const int k = lambda.half_points();
  const double delta = lambda.step();
  const CocycleCheck pre = check_cocycle(lambda, 50'000'000);
  require(pre.modulus_residual <= 1e-12, ErrorCode::invalid_argument, "cocycle values must have modulus 1");
  require(pre.normalization_residual <= 1e-12, ErrorCode::invalid_argument, "cocycle is not normalized");
  require(pre.cocycle_residual <= 10.0 * delta, ErrorCode::invalid_argument,
          "input is not a cocycle on this grid (residual above 10*step)");

  // (a) largest ε = 2^{-e} with |λ - 1| ≤ 2^{-1/2} on [0,ε]².
  int p = 0;
  double eps = 0.0;
  for (int e = 0; e < 60; ++e) {
    const double candidate = std::ldexp(1.0, -e);
    const double pd = candidate / delta;
    if (pd < 2.0) break;
    const long pr = std::lround(pd);
    if (std::abs(pd - static_cast<double>(pr)) > 1e-9 * pd) continue;
    if (2 * pr > k || k % pr != 0 || pr % 2 != 0) continue;
    bool ok = true;
    for (int i = 0; i <= pr && ok; ++i)
      for (int j = 0; j <= pr && ok; ++j)
        if (lambda.defined(i, j) && std::abs(lambda.at(i, j) - 1.0) > std::sqrt(0.5)) ok = false;
    if (ok) {
      p = static_cast<int>(pr);
      eps = candidate;
      break;
    }
  }
  require(p > 0, ErrorCode::numerical, "no admissible rescaling: refine the grid or enlarge the range");

  TrivializeResult res{Cochain(delta, lambda.half_range())};
  res.epsilon = eps;
  res.period_points = p;

  // (b) step recursion and λ¹ = λ·∂μ, which is 1 on (nε, [0,ε)).
  const Cochain mu = step_recursion(lambda, p);
  const CocycleGrid l1 = twist(lambda, mu, false);
  for (int n = -k / p; n <= k / p; ++n)
    for (int r = 0; r < p; ++r)
      if (n * p + r <= k && l1.defined(n * p, r))
        res.stage_b_residual = std::max(res.stage_b_residual, std::abs(l1.at(n * p, r) - 1.0));

  // (c) α(t) = mean over one period of arg λ¹(·, t), for t ∈ [0, ε].
  std::vector<double> alpha(static_cast<std::size_t>(p) + 1, 0.0);
  for (int r = 0; r <= p; ++r) {
    double sum = 0.0;
    for (int i = 0; i < p; ++i) {
      const Complex v = l1.at(i, r);
      if (std::abs(v + 1.0) < 1e-6) fail(ErrorCode::numerical, "branch margin violated - refine grid");
      sum += std::arg(v);
    }
    alpha[static_cast<std::size_t>(r)] = sum / p;
  }

  // (d) μ¹ = e^{iα}, extended by μ¹(nε + r) = μ¹(ε)^n e^{iα(r)}.
  Cochain mu1(delta, lambda.half_range());
  const Complex period_value = std::exp(kI * alpha[static_cast<std::size_t>(p)]);
  for (int n = -k / p; n <= k / p; ++n) {
    Complex pw = 1.0;
    for (int m = 0; m < std::abs(n); ++m) pw *= n > 0 ? period_value : std::conj(period_value);
    for (int r = 0; r < p && n * p + r <= k; ++r)
      mu1.set(n * p + r, unit(pw * std::exp(kI * alpha[static_cast<std::size_t>(r)])));
  }
  const CocycleGrid l2 = twist(l1, mu1, true);
  for (int i = 0; i <= p / 2; ++i)
    for (int j = 0; j <= p / 2; ++j)
      res.stage_d_residual = std::max(res.stage_d_residual, std::abs(l2.at(i, j) - 1.0));

  // (e) halve the scale and run the step recursion once more.
  const Cochain mu2 = step_recursion(l2, p / 2);
  const CocycleGrid l4 = twist(l2, mu2, false);
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j)
      if (l4.defined(i, j)) res.final_residual = std::max(res.final_residual, std::abs(l4.at(i, j) - 1.0));

  // λ = ∂(conj μ · μ¹ · conj μ²)
  for (int i = -k; i <= k; ++i) res.mu.set(i, unit(std::conj(mu.at(i)) * mu1.at(i) * std::conj(mu2.at(i))));
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) {
      if (!lambda.defined(i, j) || std::abs(i + j) > k) {
        ++res.undefined_entries;
        continue;
      }
      res.residual = std::max(res.residual, std::abs(lambda.at(i, j) - boundary(res.mu, i, j)));
    }
  return res;
}

double interpolation_residual(const Cochain& mu, const std::function<Complex(double, double)>& lambda,
                              int stride) {
  require(stride >= 1, ErrorCode::invalid_argument, "stride must be positive");
  const int k = mu.half_points();
  const double delta = mu.step();
  const double kappa = std::arg(mu.at(1) * std::conj(mu.at(0))) / delta;
  auto reduced = [&](int i) { return mu.at(i) * std::exp(-kI * kappa * (i * delta)); };
  std::vector<double> phase(static_cast<std::size_t>(2 * k + 1));
  phase[static_cast<std::size_t>(k)] = std::arg(reduced(0));
  for (int i = 1; i <= k; ++i) {
    phase[static_cast<std::size_t>(k + i)] =
        phase[static_cast<std::size_t>(k + i - 1)] + std::arg(reduced(i) * std::conj(reduced(i - 1)));
    phase[static_cast<std::size_t>(k - i)] =
        phase[static_cast<std::size_t>(k - i + 1)] + std::arg(reduced(-i) * std::conj(reduced(-i + 1)));
  }
  // midpoint (i + 1/2)δ for i ∈ [-K, K-1]
  auto mid = [&](int i) {
    const double ph = 0.5 * (phase[static_cast<std::size_t>(k + i)] + phase[static_cast<std::size_t>(k + i + 1)]);
    return std::exp(kI * (ph + kappa * (i + 0.5) * delta));
  };
  double worst = 0.0;
  for (int i = -k; i < k; i += stride)
    for (int j = -k; j < k; j += stride) {
      const int sum = i + j + 1;
      if (std::abs(sum) > k) continue;
      const Complex b = mid(i) * mid(j) * std::conj(mu.at(sum));
      worst = std::max(worst, std::abs(lambda((i + 0.5) * delta, (j + 0.5) * delta) - b));
    }
  return worst;
}

double coboundary_distance(const Cochain& a, const Cochain& b) {
  require(a.half_points() == b.half_points() && a.step() == b.step(), ErrorCode::invalid_argument,
          "cochains on different grids");
  const int k = a.half_points();
  double worst = 0.0;
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j)
      if (std::abs(i + j) <= k) worst = std::max(worst, std::abs(boundary(a, i, j) - boundary(b, i, j)));
  return worst;
}

}  // namespace kmslab
