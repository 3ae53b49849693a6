#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fiberdim {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool as_line = true;
};

struct ChartSpec {
  std::string title;
  std::string x_label, y_label;
  bool log_x = false, log_y = false;
  std::vector<ChartSeries> series;
  // optional fitted line y = slope * x + intercept in (possibly log) chart space
  std::optional<std::pair<double, double>> fit;  // slope, intercept
};

// Deterministic static SVG chart; byte-identical output for identical specs.
std::string render_chart(const ChartSpec& spec);

}  // namespace fiberdim
