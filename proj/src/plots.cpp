#include "demix/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "demix/errors.hpp"

namespace demix::plots {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 600.0;   // plot area ends here; legend to the right
constexpr double kTop = 48.0;
constexpr double kBottom = 420.0;

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series, double y_min,
                           double y_max) {
  if (series.empty()) throw ConfigError("line_chart_svg: no series to plot");
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
  }
  if (!(x_min <= x_max)) throw ConfigError("line_chart_svg: no points to plot");
  if (x_min == x_max) {
    x_min -= 1.0;
    x_max += 1.0;
  }
  if (!(y_min < y_max)) y_max = y_min + 1.0;

  const auto sx = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  const auto sy = [&](double y) {
    return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth, "%.0f")
      << "\" height=\"" << fmt(kHeight, "%.0f") << "\" viewBox=\"0 0 "
      << fmt(kWidth, "%.0f") << " " << fmt(kHeight, "%.0f") << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"24\" "
      << "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";

  // Axes.
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\""
      << fmt(kRight) << "\" y2=\"" << fmt(kBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\""
      << fmt(kLeft) << "\" y2=\"" << fmt(kBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / ticks;
    const double px = sx(fx);
    svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(kBottom) << "\" x2=\""
        << fmt(px) << "\" y2=\"" << fmt(kBottom + 5)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(kBottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(fx, "%.4g") << "</text>\n";

    const double fy = y_min + (y_max - y_min) * i / ticks;
    const double py = sy(fy);
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py) << "\" x2=\""
        << fmt(kLeft) << "\" y2=\"" << fmt(py)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(py) << "\" x2=\""
        << fmt(kRight) << "\" y2=\"" << fmt(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 9) << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(fy, "%.4g") << "</text>\n";
  }

  svg << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\""
      << fmt(kHeight - 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << fmt((kTop + kBottom) / 2) << ")\">"
      << escape(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    const Series& s = series[si];
    if (!s.points.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i > 0) svg << " ";
        svg << fmt(sx(s.points[i].first)) << "," << fmt(sy(s.points[i].second));
      }
      svg << "\"/>\n";
      for (const auto& [x, y] : s.points) {
        svg << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = kTop + 10.0 + 20.0 * static_cast<double>(si);
    svg << "<line x1=\"" << fmt(kRight + 14) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(kRight + 38) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(kRight + 44) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.name)
        << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace demix::plots
