#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kmslab {

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
  bool stems = false;  // vertical marks at each x instead of a polyline
};

// Static SVG; identical input gives identical bytes. Throws on empty data.
std::string render_svg(const PlotSpec& spec);

}  // namespace kmslab
