#pragma once

#include <string>
#include <vector>

namespace mind {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  /// Draw markers at the data points.
  bool markers = false;
  int width = 640;
  int height = 420;
  std::vector<PlotSeries> series;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string svg_line_plot(const PlotSpec& spec);

} // namespace mind
