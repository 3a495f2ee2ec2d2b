#include "kmslab/quadrature.hpp"

#include <cmath>

#include "kmslab/error.hpp"

namespace kmslab {

// Newton iteration on the orthonormal Hermite recurrence, in long double.
GaussHermiteRule::GaussHermiteRule(int npoints) {
  require(npoints >= 1 && npoints <= 512, ErrorCode::invalid_argument,
          "Gauss-Hermite node count must be in [1, 512]");
  const int n = npoints;
  const long double pim4 = 0.7511255444649424828587030047762276930510L;  // π^{-1/4}
  std::vector<long double> x(n), w(n);
  const int m = (n + 1) / 2;
  long double z = 0.0L;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(static_cast<long double>(2 * n + 1)) -
          1.85575L * std::pow(static_cast<long double>(2 * n + 1), -0.16667L);
    else if (i == 1)
      z -= 1.14L * std::pow(static_cast<long double>(n), 0.426L) / z;
    else if (i == 2)
      z = 1.86L * z - 0.86L * x[0];
    else if (i == 3)
      z = 1.91L * z - 0.91L * x[1];
    else
      z = 2.0L * z - x[i - 2];
    long double pp = 0.0L;
    int it = 0;
    for (; it < 200; ++it) {
      long double p1 = pim4, p2 = 0.0L;
      for (int j = 0; j < n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0L / (j + 1)) * p2 - std::sqrt(static_cast<long double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0L * n) * p2;
      const long double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-18L * std::max(1.0L, std::fabs(z))) break;
    }
    require(it < 200, ErrorCode::numerical, "Gauss-Hermite node iteration did not converge");
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0L / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  nodes.resize(n);
  weights.resize(n);
  // ascending order
  for (int i = 0; i < n; ++i) {
    nodes[i] = static_cast<double>(x[n - 1 - i]);
    weights[i] = static_cast<double>(w[n - 1 - i]);
  }
}

}  // namespace kmslab
