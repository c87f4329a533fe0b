#pragma once

#include <string>
#include <vector>

namespace tiltsense::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "black";
  std::string dash;  // SVG stroke-dasharray, empty for solid
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Round tick positions covering [lo, hi] with about `target` intervals.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

/// Panels laid out row-major, `columns` per row, each with axes, ticks,
/// labels and a legend. Every curve is a <polyline> tagged with
/// data-series="<label>".
std::string render_svg(const std::vector<Panel>& panels, int columns = 2);

}  // namespace tiltsense::cli
