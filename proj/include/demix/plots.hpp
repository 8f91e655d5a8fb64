#pragma once

#include <string>
#include <utility>
#include <vector>

namespace demix::plots {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y), x ascending
};

// Self-contained SVG line chart: one polyline with point markers per series,
// labeled axes, tick marks, and a legend. Output bytes depend only on the
// arguments.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series, double y_min,
                           double y_max);

}  // namespace demix::plots
