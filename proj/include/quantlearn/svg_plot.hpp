// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace quantlearn {

struct LineSeries {
  std::string label;
  std::string color;  ///< any SVG color
  std::vector<std::pair<double, double>> points;
  double stroke_width = 1.5;
};

struct LineChart {
  std::string title;
  std::string x_label = "global step";
  std::string y_label = "median accuracy";
  double y_min = 0.4;
  double y_max = 1.0;
  std::optional<double> reference_y = 0.5;  ///< dashed horizontal guide (chance level)
  int width = 720;
  int height = 440;
  std::vector<LineSeries> series;
};

/// Standalone SVG document. The x range spans all series points; y values are
/// clamped to [y_min, y_max]. One <polyline> per series, drawn in order.
std::string render_svg(const LineChart& chart);

}  // namespace quantlearn
