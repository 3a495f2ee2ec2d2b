#pragma once

#include <vector>

namespace kmslab {

// Gauss–Hermite rule for ∫ e^{-u²} f(u) du. Nodes ascending.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermiteRule(int npoints);
  int size() const { return static_cast<int>(nodes.size()); }
};

}  // namespace kmslab
