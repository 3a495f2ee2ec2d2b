#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace kmslab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational exact() const { return Rational(num, den); }
};

inline constexpr std::int64_t kMaxDenominator = 1000000;

// Continued-fraction recognition of x as p/q. Accepts the first convergent with
// |x - p/q| <= tol, q <= max_den and q²|x - p/q| <= 1e-3; the last condition
// rejects the accidental good approximations that every irrational has.
std::optional<Fraction> rationalize(double x, double tol, std::int64_t max_den = kMaxDenominator);

std::int64_t gcd64(std::int64_t a, std::int64_t b);

// Positive generator of the subgroup of Q generated by the fractions.
Fraction fraction_gcd(std::span<const Fraction> xs);

std::string to_string(const Rational& q);
double to_double(const Rational& q);

}  // namespace kmslab
