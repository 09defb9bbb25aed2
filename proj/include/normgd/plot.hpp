#pragma once

#include <optional>
#include <string>
#include <vector>

namespace normgd::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
  bool line = true;
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<std::string> annotation;
  int width = 640;
  int height = 420;
};

/// Standalone SVG document. Non-finite points are dropped.
std::string render_svg(const Figure& fig);

}  // namespace normgd::plot
