#include <algorithm>
#include <cstdio>
#include <map>

#include "common/svg.hpp"
#include "coverage/svg.hpp"
#include "pipeline/pipeline.hpp"

namespace fairgen {

namespace {

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Maps data ranges onto a fixed-size plotting area (world units 0..1.6 x 0..1).
class Axes {
 public:
  Axes(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1.0;
    if (!(y1_ > y0_)) y1_ = y0_ + 1.0;
  }

  Point2 map(double x, double y) const { return {kWidth * (x - x0_) / (x1_ - x0_), (y - y0_) / (y1_ - y0_)}; }

  void draw(SvgCanvas& svg, const std::string& xlabel, const std::string& ylabel) const {
    svg.rect({0.0, 0.0, kWidth, 1.0}, "fill:none;stroke:black;stroke-width:1");
    for (int t = 0; t <= 4; ++t) {
      const double f = t / 4.0;
      const Point2 bx{kWidth * f, 0.0}, ly{0.0, f};
      svg.text(svg.px(bx.x) - 10.0, svg.py(0.0) + 16.0, number(x0_ + f * (x1_ - x0_)), "font:11px sans-serif");
      svg.text(svg.px(0.0) - 38.0, svg.py(ly.y) + 4.0, number(y0_ + f * (y1_ - y0_)), "font:11px sans-serif");
    }
    svg.text(svg.px(kWidth / 2.0) - 30.0, svg.py(0.0) + 34.0, xlabel);
    svg.text(4.0, svg.py(1.0) - 12.0, ylabel);
  }

  static constexpr double kWidth = 1.6;

 private:
  double x0_, x1_, y0_, y1_;
};

SvgCanvas plot_canvas() { return SvgCanvas({0.0, 0.0, Axes::kWidth, 1.0}, 450.0, 60.0); }

}  // namespace

std::string curves_svg(std::span<const CurvePoint> points) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  bool first = true;
  for (const auto& p : points) {
    const double x = static_cast<double>(p.samples);
    series[p.method].emplace_back(x, p.score);
    if (first) {
      x0 = x1 = x;
      y1 = p.score;
      first = false;
    }
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y1 = std::max(y1, p.score);
  }
  y1 *= 1.05;
  const Axes axes(x0, x1, y0, y1);
  SvgCanvas svg = plot_canvas();
  axes.draw(svg, "sample count", "coverage score");
  std::size_t k = 0;
  for (auto& [method, pts] : series) {
    std::sort(pts.begin(), pts.end());
    std::vector<Point2> line;
    for (const auto& [x, y] : pts) line.push_back(axes.map(x, y));
    svg.polyline(line, "fill:none;stroke:" + colour(k) + ";stroke-width:2");
    for (const auto& q : line) svg.marker(q, "dot", 3.0, colour(k));
    svg.text(svg.px(0.05), svg.py(0.95) + 14.0 * static_cast<double>(k), method,
             "font:12px sans-serif;fill:" + colour(k));
    ++k;
  }
  return svg.str();
}

std::string error_scatter_svg(const GenerativeEvaluation& eval) {
  double hi = 0.0;
  for (const auto& e : eval.errors) hi = std::max({hi, e.abs_p1, e.abs_p2});
  hi = hi > 0.0 ? hi * 1.05 : 1.0;
  const Axes axes(0.0, hi, 0.0, hi);
  SvgCanvas svg = plot_canvas();
  axes.draw(svg, "|error| property 1", "|error| property 2");
  for (const auto& e : eval.errors) svg.marker(axes.map(e.abs_p1, e.abs_p2), "dot", 2.0, colour(e.dataset));
  for (std::size_t i = 0; i < eval.rows.size(); ++i) {
    svg.text(svg.px(1.1), svg.py(0.95) + 14.0 * static_cast<double>(i),
             eval.rows[i].label + "  MAE " + number(eval.rows[i].mae), "font:12px sans-serif;fill:" + colour(i));
  }
  return svg.str();
}

std::string iteration_svg(const IterationArtifacts& artifacts, const IterationRecord& record,
                          const CoverageConfig& coverage) {
  std::vector<Point2> all = artifacts.previous_points;
  all.insert(all.end(), artifacts.appended_points.begin(), artifacts.appended_points.end());
  const auto diagram = geom::build_voronoi(all, coverage.box);
  char title[96];
  std::snprintf(title, sizeof(title), "iteration %zu  S_C %.4f -> %.4f", record.iteration, record.sc_before,
                record.sc_after);
  const std::vector<PointLayer> layers{
      {artifacts.previous_points, "#444444", "dot", 1.2, title},
      {artifacts.appended_points, "#2ca02c", "cross", 3.0, "generated designs"},
      {record.targets, "#d62728", "diamond", 5.0, "target properties"},
  };
  return coverage_svg(diagram, coverage.rho, layers, 100.0);
}

}  // namespace fairgen
