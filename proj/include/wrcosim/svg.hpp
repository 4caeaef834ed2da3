#pragma once

#include <span>
#include <string>
#include <vector>

namespace wrcosim {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  bool markers = false;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Minimal line plot as a standalone SVG document. On log axes,
/// non-positive samples are skipped.
std::string render_svg(std::span<const PlotSeries> series, const PlotOptions& options);

}  // namespace wrcosim
