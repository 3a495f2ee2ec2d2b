#include "kmslab/rational.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace kmslab {

std::optional<Fraction> rationalize(double x, double tol, std::int64_t max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  // convergents h_k / k_k
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
  std::int64_t k_prev = 0, k = 1;
  double rem = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    const double err = std::abs(x - static_cast<double>(h) / static_cast<double>(k));
    const double kd = static_cast<double>(k);
    if (err <= tol && kd * kd * err <= 1e-3) return Fraction{h, k};
    if (rem < 1e-300) break;
    const double inv = 1.0 / rem;
    if (inv > 1e15) break;
    const auto a = static_cast<std::int64_t>(std::floor(inv));
    rem = inv - std::floor(inv);
    const std::int64_t h_next = a * h + h_prev;
    const std::int64_t k_next = a * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h; h = h_next;
    k_prev = k; k = k_next;
  }
  const double err = std::abs(x - static_cast<double>(h) / static_cast<double>(k));
  const double kd = static_cast<double>(k);
  if (err <= tol && kd * kd * err <= 1e-3) return Fraction{h, k};
  return std::nullopt;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

Fraction fraction_gcd(std::span<const Fraction> xs) {
  // gcd(p_i/q_i) = gcd(p_i * L/q_i) / L with L = lcm(q_i)
  std::int64_t l = 1;
  for (const Fraction& f : xs)
    if (f.num != 0) l = std::lcm(l, f.den);
  std::int64_t g = 0;
  for (const Fraction& f : xs)
    if (f.num != 0) g = std::gcd(g, std::abs(f.num) * (l / f.den));
  if (g == 0) return {0, 1};
  const std::int64_t r = std::gcd(g, l);
  return {g / r, l / r};
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace kmslab
