// SPDX-License-Identifier: Apache-2.0
#include "quantlearn/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace quantlearn {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  constexpr double kLeft = 64, kRight = 150, kTop = 36, kBottom = 52;
  const double plot_w = chart.width - kLeft - kRight;
  const double plot_h = chart.height - kTop - kBottom;

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  for (const auto& s : chart.series) {
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0;
    x_hi = 1;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1;

  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) {
    y = std::clamp(y, chart.y_min, chart.y_max);
    return kTop + (chart.y_max - y) / (chart.y_max - chart.y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
      << chart.height << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << escape(chart.title) << "</text>\n";

  // Grid and y ticks every 0.1.
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int k = 0;; ++k) {
    const double y = chart.y_min + 0.1 * k;
    if (y > chart.y_max + 1e-9) break;
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y2=\"" << num(py(y)) << "\" stroke=\"#e5e5e5\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">"
        << tick_label(std::round(y * 10) / 10) << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double x = x_lo + (x_hi - x_lo) * k / 5.0;
    svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 16)
        << "\" text-anchor=\"middle\">" << tick_label(std::round(x)) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(chart.height - 12.0)
      << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << num(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label) << "</text>\n";
  svg << "</g>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w) << "\" height=\""
      << num(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  if (chart.reference_y) {
    svg << "<line class=\"reference\" x1=\"" << num(kLeft) << "\" y1=\"" << num(py(*chart.reference_y))
        << "\" x2=\"" << num(kLeft + plot_w) << "\" y2=\"" << num(py(*chart.reference_y))
        << "\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n";
  }

  for (const auto& s : chart.series) {
    svg << "<polyline fill=\"none\" stroke=\"" << escape(s.color) << "\" stroke-width=\"" << num(s.stroke_width)
        << "\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) svg << ' ';
      svg << num(px(s.points[i].first)) << ',' << num(py(s.points[i].second));
    }
    svg << "\"><title>" << escape(s.label) << "</title></polyline>\n";
  }

  // Legend.
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    const double x = kLeft + plot_w + 12;
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 22) << "\" y2=\"" << num(y)
        << "\" stroke=\"" << escape(chart.series[i].color) << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(x + 28) << "\" y=\"" << num(y + 4) << "\">" << escape(chart.series[i].label)
        << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace quantlearn
