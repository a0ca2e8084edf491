#pragma once

// Minimal SVG line plots: one or more panels side by side, polylines per
// series, linear or log axes. Non-finite points (and nonpositive ones on a
// log axis) break the polyline.

#include <string>
#include <vector>

namespace flexneedlet::cli::svg {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct Panel {
  std::string title;
  std::string xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<Series> series;
};

std::string render(const std::vector<Panel>& panels, int panel_width = 440, int panel_height = 340);

}  // namespace flexneedlet::cli::svg
