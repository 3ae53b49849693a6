#include "fiberdim/svg.hpp"

#include <algorithm>
#include <cmath>

#include "fiberdim/csv.hpp"

namespace fiberdim {

namespace {

constexpr double kW = 640, kH = 440;
constexpr double kL = 70, kR = 20, kT = 40, kB = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};

std::string num(double v) { return format_double(v); }

}  // namespace

std::string render_chart(const ChartSpec& spec) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : spec.series) {
    for (auto [x, y] : s.points) {
      double px = spec.log_x ? std::log10(x) : x;
      double py = spec.log_y ? std::log10(y) : y;
      if (first) {
        xmin = xmax = px;
        ymin = ymax = py;
        first = false;
      } else {
        xmin = std::min(xmin, px);
        xmax = std::max(xmax, px);
        ymin = std::min(ymin, py);
        ymax = std::max(ymax, py);
      }
    }
  }
  if (first) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  auto X = [&](double x) {
    double px = spec.log_x ? std::log10(x) : x;
    return kL + (px - xmin) / (xmax - xmin) * (kW - kL - kR);
  };
  auto Y = [&](double y) {
    double py = spec.log_y ? std::log10(y) : y;
    return kH - kB - (py - ymin) / (ymax - ymin) * (kH - kT - kB);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" +
         num(kH) + "\" viewBox=\"0 0 " + num(kW) + " " + num(kH) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         spec.title + "</text>\n";
  // axes
  svg += "<line x1=\"" + num(kL) + "\" y1=\"" + num(kH - kB) + "\" x2=\"" + num(kW - kR) +
         "\" y2=\"" + num(kH - kB) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kL) + "\" y1=\"" + num(kT) + "\" x2=\"" + num(kL) + "\" y2=\"" +
         num(kH - kB) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(kW / 2) + "\" y=\"" + num(kH - 12) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + spec.x_label + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kH / 2) + "\" text-anchor=\"middle\" font-size=\"12\" " +
         "transform=\"rotate(-90 16 " + num(kH / 2) + ")\">" + spec.y_label + "</text>\n";
  // axis range labels in chart coordinates
  svg += "<text x=\"" + num(kL) + "\" y=\"" + num(kH - kB + 16) +
         "\" font-size=\"10\" text-anchor=\"middle\">" + num(xmin) + "</text>\n";
  svg += "<text x=\"" + num(kW - kR) + "\" y=\"" + num(kH - kB + 16) +
         "\" font-size=\"10\" text-anchor=\"middle\">" + num(xmax) + "</text>\n";
  svg += "<text x=\"" + num(kL - 6) + "\" y=\"" + num(kH - kB) +
         "\" font-size=\"10\" text-anchor=\"end\">" + num(ymin) + "</text>\n";
  svg += "<text x=\"" + num(kL - 6) + "\" y=\"" + num(kT + 4) +
         "\" font-size=\"10\" text-anchor=\"end\">" + num(ymax) + "</text>\n";

  size_t ci = 0;
  for (const auto& s : spec.series) {
    const char* color = kColors[ci % 5];
    ++ci;
    if (s.as_line && s.points.size() > 1) {
      std::string pts;
      for (auto [x, y] : s.points) pts += num(X(x)) + "," + num(Y(y)) + " ";
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"" + pts +
             "\"/>\n";
    }
    for (auto [x, y] : s.points) {
      svg += "<circle cx=\"" + num(X(x)) + "\" cy=\"" + num(Y(y)) + "\" r=\"3\" fill=\"" +
             std::string(color) + "\"/>\n";
    }
  }
  if (spec.fit) {
    auto [slope, intercept] = *spec.fit;
    // endpoints in chart space
    double y0 = slope * xmin + intercept, y1 = slope * xmax + intercept;
    auto XX = [&](double px) { return kL + (px - xmin) / (xmax - xmin) * (kW - kL - kR); };
    auto YY = [&](double py) { return kH - kB - (py - ymin) / (ymax - ymin) * (kH - kT - kB); };
    svg += "<line x1=\"" + num(XX(xmin)) + "\" y1=\"" + num(YY(y0)) + "\" x2=\"" + num(XX(xmax)) +
           "\" y2=\"" + num(YY(y1)) + "\" stroke=\"#555\" stroke-dasharray=\"6 3\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace fiberdim
