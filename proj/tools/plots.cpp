#include "plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <vector>

namespace stackmnar::cli {

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (phi1, value)
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;

struct Frame {
  double x_min, x_max, y_min, y_max;
  double x(double v) const {
    if (x_max == x_min) return kLeft + 0.5 * (kWidth - kLeft - kRight);
    return kLeft + (v - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight);
  }
  double y(double v) const {
    if (y_max == y_min) return kTop + 0.5 * (kHeight - kTop - kBottom);
    return kHeight - kBottom - (v - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom);
  }
};

void render(const std::string& path, const std::string& title, const std::string& y_label,
            std::vector<Series> series, double reference_line) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (series.empty() || x_min > x_max) {
    x_min = 0;
    x_max = 1;
    y_min = 0;
    y_max = 1;
  }
  y_min = std::min(y_min, reference_line);
  y_max = std::max(y_max, reference_line);
  const double pad = std::max(1e-9, 0.08 * (y_max - y_min));
  y_min -= pad;
  y_max += pad;
  Frame f{x_min, x_max, y_min, y_max};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";

  // Axes and ticks.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_min + t * (x_max - x_min) / 4.0;
    const double yv = y_min + t * (y_max - y_min) / 4.0;
    out << "<text x=\"" << f.x(xv) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << xv << "</text>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << f.y(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << yv << "</text>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << f.y(yv) << "\" x2=\"" << kWidth - kRight
        << "\" y2=\"" << f.y(yv) << "\" stroke=\"#eeeeee\"/>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">assumed phi1</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << y_label << "</text>\n";

  out << "<line x1=\"" << kLeft << "\" y1=\"" << f.y(reference_line) << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << f.y(reference_line)
      << "\" stroke=\"#999999\" stroke-dasharray=\"6 4\"/>\n";

  int color = 0;
  double legend_y = kTop + 6;
  for (auto& s : series) {
    std::sort(s.points.begin(), s.points.end());
    const char* stroke = kColors[color % 8];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.8\" points=\"";
    for (const auto& [x, y] : s.points) out << f.x(x) << ',' << f.y(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      out << "<circle cx=\"" << f.x(x) << "\" cy=\"" << f.y(y) << "\" r=\"2.6\" fill=\""
          << stroke << "\"/>\n";
    }
    out << "<rect x=\"" << kWidth - kRight - 170 << "\" y=\"" << legend_y - 8
        << "\" width=\"10\" height=\"10\" fill=\"" << stroke << "\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 155 << "\" y=\"" << legend_y + 1
        << "\" font-size=\"11\">" << s.label << "</text>\n";
    legend_y += 16;
    ++color;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_estimate_plot(const SimulationReport& report, const SimulationConfig& config,
                         const std::string& path) {
  (void)config;
  std::map<std::string, Series> by_method;
  for (const auto& cell : report.cells) {
    if (cell.parameter != "Z2") continue;
    Series& s = by_method[cell.method];
    s.label = cell.method;
    // One point per (method, phi1); the SE methods share the estimate.
    bool seen = false;
    for (const auto& [x, y] : s.points) seen = seen || x == cell.assumed_phi1;
    if (!seen) s.points.emplace_back(cell.assumed_phi1, cell.mean_estimate);
  }
  std::vector<Series> series;
  for (auto& [name, s] : by_method) series.push_back(std::move(s));
  render(path, "mean estimate of the Z2 coefficient", "mean estimate", std::move(series),
         true_parameter_value("Z2"));
}

void write_coverage_plot(const SimulationReport& report, const SimulationConfig& config,
                         const std::string& path) {
  (void)config;
  std::map<std::string, Series> by_cell;
  for (const auto& cell : report.cells) {
    if (cell.parameter != "Z2" || std::isnan(cell.coverage)) continue;
    const std::string key = cell.method + "/" + cell.se_method;
    Series& s = by_cell[key];
    s.label = key;
    s.points.emplace_back(cell.assumed_phi1, cell.coverage);
  }
  std::vector<Series> series;
  for (auto& [name, s] : by_cell) series.push_back(std::move(s));
  render(path, "coverage of nominal 95% intervals (Z2 coefficient)", "coverage",
         std::move(series), 0.95);
}

}  // namespace stackmnar::cli
