#pragma once

// Minimal deterministic SVG line/scatter plots. No external assets, no
// scripts; the only run-dependent byte range is a timestamp comment near
// the top, so two renders of the same data differ in that comment alone.

#include <string>
#include <utility>
#include <vector>

namespace kfree {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> pts;
  bool line = true;   // false: markers only
  std::string color;  // empty: pick from a fixed palette by index
};

struct PlotStyle {
  int width = 720;
  int height = 480;
  std::string title;
  std::string x_label;
  std::string y_label;
};

// Renders the series into a standalone SVG document. Axis limits come from
// the data with a small margin; ticks land on round values.
std::string render_plot_svg(const std::vector<PlotSeries>& series,
                            const PlotStyle& style);

}  // namespace kfree
