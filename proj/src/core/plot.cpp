#include "kmslab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kmslab/error.hpp"

namespace kmslab {

namespace {

constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  require(!spec.points.empty(), ErrorCode::invalid_argument, "nothing to plot");
  double x0 = spec.points.front().first, x1 = x0, y0 = 0.0, y1 = 0.0;
  for (const auto& [x, y] : spec.points) {
    require(std::isfinite(x) && std::isfinite(y), ErrorCode::invalid_argument, "non-finite plot value");
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (x1 - x0 < 1e-12) { x0 -= 1.0; x1 += 1.0; }
  if (y1 - y0 < 1e-12) y1 = y0 + 1.0;
  const double pad = 0.05 * (x1 - x0);
  x0 -= pad;
  x1 += pad;
  y1 += 0.1 * (y1 - y0);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << escape(spec.title) << "</text>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(kLeft + pw) << "\" y2=\""
     << fixed(kTop + ph) << "\"/>\n";
  os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
     << fixed(kTop + ph) << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    os << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(kTop + ph + 16) << "\" text-anchor=\"middle\">"
       << fixed(xv, 3) << "</text>\n";
    os << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(sy(yv) + 4) << "\" text-anchor=\"end\">"
       << fixed(yv, 2) << "</text>\n";
  }
  os << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 14)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(spec.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << fixed(kTop + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n</g>\n";

  if (spec.stems) {
    os << "<g stroke=\"#1f5fa8\" stroke-width=\"3\" fill=\"#1f5fa8\">\n";
    for (const auto& [x, y] : spec.points) {
      os << "<line x1=\"" << fixed(sx(x)) << "\" y1=\"" << fixed(sy(y0)) << "\" x2=\"" << fixed(sx(x)) << "\" y2=\""
         << fixed(sy(y)) << "\"/>\n";
      os << "<circle cx=\"" << fixed(sx(x)) << "\" cy=\"" << fixed(sy(y)) << "\" r=\"4\"/>\n";
    }
    os << "</g>\n";
  } else {
    os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < spec.points.size(); ++i)
      os << (i ? " " : "") << fixed(sx(spec.points[i].first)) << "," << fixed(sy(spec.points[i].second));
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace kmslab
