#pragma once

// Output plumbing: atomic file writes, CSV buffers, and a small self-contained
// SVG scatter writer. Plots are a convenience; the CSVs are the contract.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stratasim/population.hpp"

namespace stratasim {

/// Writes via a temp file + rename so readers never observe partial output.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

class CsvBuilder {
 public:
  explicit CsvBuilder(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) buf_ << ',';
      buf_ << header[i];
    }
    buf_ << '\n';
    columns_ = header.size();
  }

  CsvBuilder& cell(double v) {
    sep();
    buf_ << format_double(v);
    return *this;
  }
  CsvBuilder& cell(int v) {
    sep();
    buf_ << v;
    return *this;
  }
  CsvBuilder& cell(std::size_t v) {
    sep();
    buf_ << v;
    return *this;
  }
  CsvBuilder& cell(const std::string& v) {
    sep();
    buf_ << v;
    return *this;
  }
  CsvBuilder& endrow() {
    if (in_row_ != columns_) throw std::logic_error("csv row arity mismatch");
    buf_ << '\n';
    in_row_ = 0;
    return *this;
  }

  std::string str() const { return buf_.str(); }

 private:
  void sep() {
    if (in_row_) buf_ << ',';
    ++in_row_;
  }
  std::ostringstream buf_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

struct SvgGroup {
  std::vector<std::pair<double, double>> points;
  std::string color = "#3366cc";
  double radius = 1.5;
};

struct SvgLine {
  double x1, y1, x2, y2;
  std::string color = "#222222";
};

/// Scatter plot with data-space lines. Groups larger than `max_points` are
/// down-sampled with a deterministic stride.
inline std::string render_svg_scatter(const std::vector<SvgGroup>& groups,
                                      const std::vector<SvgLine>& lines, const std::string& title,
                                      int width = 640, int height = 480,
                                      std::size_t max_points = 4000) {
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& g : groups)
    for (auto [x, y] : g.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin < xmax)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymin < ymax)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  double padx = 0.05 * (xmax - xmin), pady = 0.05 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;
  auto px = [&](double x) { return (x - xmin) / (xmax - xmin) * (width - 40) + 20; };
  auto py = [&](double y) { return height - 30 - (y - ymin) / (ymax - ymin) * (height - 60); };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  if (!title.empty())
    svg << "<text x='" << width / 2 << "' y='16' text-anchor='middle' font-size='13' "
        << "font-family='sans-serif'>" << title << "</text>\n";
  for (const auto& g : groups) {
    std::size_t stride = g.points.size() > max_points ? g.points.size() / max_points + 1 : 1;
    svg << "<g fill='" << g.color << "' fill-opacity='0.55'>\n";
    for (std::size_t i = 0; i < g.points.size(); i += stride) {
      auto [x, y] = g.points[i];
      svg << "<circle cx='" << format_double(px(x)) << "' cy='" << format_double(py(y))
          << "' r='" << g.radius << "'/>\n";
    }
    svg << "</g>\n";
  }
  for (const auto& l : lines) {
    svg << "<line x1='" << format_double(px(l.x1)) << "' y1='" << format_double(py(l.y1))
        << "' x2='" << format_double(px(l.x2)) << "' y2='" << format_double(py(l.y2))
        << "' stroke='" << l.color << "' stroke-width='1.5'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

/// Boundary segment theta . x = theta0 clipped to the bounding box of `pop`.
inline std::vector<SvgLine> boundary_segment(const Classifier& c, const Population& pop) {
  if (c.dim() != 2 || pop.empty()) return {};
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (const auto& a : pop) {
    xmin = std::min(xmin, a.x0[0]);
    xmax = std::max(xmax, a.x0[0]);
    ymin = std::min(ymin, a.x0[1]);
    ymax = std::max(ymax, a.x0[1]);
  }
  std::vector<std::pair<double, double>> pts;
  auto try_point = [&](double x, double y) {
    if (x >= xmin - 1e-9 && x <= xmax + 1e-9 && y >= ymin - 1e-9 && y <= ymax + 1e-9)
      pts.emplace_back(x, y);
  };
  if (std::abs(c.theta[1]) > 1e-12) {
    try_point(xmin, (c.theta0 - c.theta[0] * xmin) / c.theta[1]);
    try_point(xmax, (c.theta0 - c.theta[0] * xmax) / c.theta[1]);
  }
  if (std::abs(c.theta[0]) > 1e-12) {
    try_point((c.theta0 - c.theta[1] * ymin) / c.theta[0], ymin);
    try_point((c.theta0 - c.theta[1] * ymax) / c.theta[0], ymax);
  }
  if (pts.size() < 2) return {};
  return {SvgLine{pts[0].first, pts[0].second, pts[1].first, pts[1].second}};
}

}  // namespace stratasim
