#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "coverage/coverage.hpp"
#include "coverage/geometry.hpp"
#include "coverage/svg.hpp"
#include "coverage/voronoi.hpp"

using namespace fairgen;
using geom::Point2;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Point2> random_points(Rng& rng, std::size_t n, double lo = -2.0, double hi = 4.0) {
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({rng.uniform(lo, hi), rng.uniform(lo, hi)});
  return pts;
}

// Lens area by midpoint integration over x of the overlap chord length.
double lens_by_quadrature(double r, double s) {
  if (s >= 2.0 * r) return 0.0;
  // Disks centred at (0,0) and (s,0); overlap x in [s - r, r].
  const double a = s - r, b = r;
  const int n = 200000;
  const double h = (b - a) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a + (i + 0.5) * h;
    const double y1 = std::sqrt(std::max(0.0, r * r - x * x));
    const double y2 = std::sqrt(std::max(0.0, r * r - (x - s) * (x - s)));
    sum += 2.0 * std::min(y1, y2) * h;
  }
  return sum;
}

bool inside_convex(const geom::Polygon& poly, Point2 q, double tol) {
  for (std::size_t i = 0; i < poly.v.size(); ++i) {
    const Point2 a = poly.v[i], b = poly.v[(i + 1) % poly.v.size()];
    const double len = std::sqrt(geom::norm2(b - a));
    if (geom::cross(b - a, q - a) < -tol * len) return false;
  }
  return true;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("is_covered follows the neighbour count with an inclusive boundary") {
  const std::vector<Point2> one{{0.0, 0.0}};
  CHECK(is_covered({0.05, 0.0}, one, 0.08, 1));
  CHECK(is_covered({0.08, 0.0}, one, 0.08, 1));
  CHECK_FALSE(is_covered({0.0801, 0.0}, one, 0.08, 1));
  CHECK_FALSE(is_covered({0.05, 0.0}, one, 0.08, 2));
  const std::vector<Point2> two{{0.0, 0.0}, {0.1, 0.0}};
  CHECK(is_covered({0.05, 0.0}, two, 0.08, 2));
  CHECK_FALSE(is_covered({-0.05, 0.0}, two, 0.08, 2));
}

TEST_CASE("exact area on trivial configurations") {
  CoverageConfig cfg;
  const double disk = kPi * cfg.rho * cfg.rho;
  const std::vector<Point2> one{{0.0, 0.0}};
  CHECK(std::abs(covered_area_exact(one, cfg).score - disk) < 1e-9);
  CHECK(std::abs(disk - 0.0201062) < 1e-7);

  const std::vector<Point2> apart{{0.0, 0.0}, {1.0, 1.0}};
  CHECK(std::abs(covered_area_exact(apart, cfg).score - 2.0 * disk) < 1e-9);

  const std::vector<Point2> dup{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5 + 1e-12}};
  CHECK(std::abs(covered_area_exact(dup, cfg).score - disk) < 1e-9);

  const std::vector<Point2> corner{{-2.0, -2.0}};
  CHECK(std::abs(covered_area_exact(corner, cfg).score - disk / 4.0) < 1e-9);

  const std::vector<Point2> edge{{1.0, 4.0}};
  CHECK(std::abs(covered_area_exact(edge, cfg).score - disk / 2.0) < 1e-9);

  for (double s : {0.01, 0.05, 0.1, 0.159}) {
    const std::vector<Point2> pair{{0.0, 0.0}, {s, 0.0}};
    const double expected = 2.0 * disk - lens_by_quadrature(cfg.rho, s);
    CHECK(std::abs(covered_area_exact(pair, cfg).score - expected) < 1e-8);
  }
}

TEST_CASE("lens area matches quadrature") {
  for (double s : {0.0, 0.02, 0.08, 0.12, 0.16, 0.2}) {
    CHECK(std::abs(geom::lens_area(0.08, s) - lens_by_quadrature(0.08, s)) < 1e-9);
  }
}

TEST_CASE("disk-polygon area matches a fine grid count") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    geom::Polygon tri;
    tri.v = {{rng.uniform(-0.1, 0.0), rng.uniform(-0.1, 0.0)},
             {rng.uniform(0.0, 0.1), rng.uniform(-0.1, 0.0)},
             {rng.uniform(-0.05, 0.05), rng.uniform(0.0, 0.1)}};
    if (geom::polygon_area(tri) < 0) std::swap(tri.v[1], tri.v[2]);
    tri.labels.assign(3, geom::Polygon::kBoxEdge);
    const Point2 c{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)};
    const double r = 0.06;
    const int n = 1500;
    const double h = 0.2 / n;
    double count = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Point2 q{-0.1 + (i + 0.5) * h, -0.1 + (j + 0.5) * h};
        if (geom::dist2(q, c) <= r * r && inside_convex(tri, q, 0.0)) count += 1;
      }
    CHECK(std::abs(geom::disk_polygon_area(tri, c, r) - count * h * h) < 2e-5);
  }
}

TEST_CASE("voronoi cells tile the box and respect the nearest-site property") {
  Rng rng(99);
  const geom::Box box;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point2> pts = random_points(rng, 20 + 40 * trial);
    if (trial % 3 == 1) {
      // Clustered sites plus a far outlier.
      for (auto& p : pts) p = {0.3 * p.x, 0.3 * p.y};
      pts.push_back({3.9, -1.9});
    }
    if (trial % 3 == 2) {
      // Collinear sites.
      for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {-1.5 + 0.01 * static_cast<double>(i), 0.7};
    }
    const auto vd = geom::build_voronoi(pts, box);
    CHECK(std::abs(vd.total_cell_area() - box.area()) <= 1e-9 * box.area());
    for (int probe = 0; probe < 300; ++probe) {
      const Point2 q{rng.uniform(box.xmin, box.xmax), rng.uniform(box.ymin, box.ymax)};
      std::size_t best = 0;
      for (std::size_t s = 1; s < vd.sites.size(); ++s)
        if (geom::dist2(q, vd.sites[s]) < geom::dist2(q, vd.sites[best])) best = s;
      CHECK(inside_convex(vd.cells[best], q, 1e-9));
    }
  }
}

TEST_CASE("voronoi deduplicates and maps inputs to sites") {
  const std::vector<Point2> pts{{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, {1.0, 1e-12}};
  const auto vd = geom::build_voronoi(pts, geom::Box{});
  CHECK(vd.sites.size() == 2);
  CHECK(vd.site_of_input[0] == vd.site_of_input[2]);
  CHECK(vd.site_of_input[1] == vd.site_of_input[3]);
  CHECK(vd.adjacency.size() == 1);
}

TEST_CASE("voronoi input validation") {
  const std::vector<Point2> outside{{10.0, 10.0}};
  CHECK(code_of([&] { geom::build_voronoi(outside, geom::Box{}); }) == ErrorCode::Domain);
  const std::vector<Point2> nan{{std::nan(""), 0.0}};
  CHECK(code_of([&] { geom::build_voronoi(nan, geom::Box{}); }) == ErrorCode::Domain);
  // Sites outside the box are kept and still contribute coverage.
  CoverageConfig cfg;
  const std::vector<Point2> mixed{{0.0, 0.0}, {4.05, 0.0}};
  const double disk = kPi * cfg.rho * cfg.rho;
  const double cap = cfg.rho * cfg.rho * std::acos(0.05 / cfg.rho) - 0.05 * std::sqrt(cfg.rho * cfg.rho - 0.0025);
  CHECK(std::abs(covered_area_exact(mixed, cfg).score - (disk + cap)) < 1e-9);
}

TEST_CASE("exact and raster areas agree on random data") {
  Rng rng(1234);
  CoverageConfig cfg;
  for (int trial = 0; trial < 4; ++trial) {
    const auto pts = random_points(rng, 200, -1.0, 3.0);
    const double exact = covered_area_exact(pts, cfg).score;
    const double raster = covered_area_raster(pts, cfg, 0.005).score;
    CHECK(std::abs(exact - raster) < 2e-3);
    CHECK(exact <= 200 * kPi * cfg.rho * cfg.rho + 1e-12);
    CHECK(exact >= 0.0);
  }
}

TEST_CASE("per-cell areas sum to the score") {
  Rng rng(8);
  CoverageConfig cfg;
  const auto pts = random_points(rng, 300, -0.5, 0.5);
  const auto rep = covered_area_exact(pts, cfg);
  double sum = 0.0;
  for (double a : rep.per_cell_area) sum += a;
  CHECK(sum == doctest::Approx(rep.score).epsilon(1e-12));
  CHECK(rep.method == CoverageMethod::Exact);
  CHECK(rep.score <= cfg.box.area());
}

TEST_CASE("k >= 2 uses the raster path") {
  CoverageConfig cfg;
  cfg.k = 2;
  const std::vector<Point2> pts{{0.0, 0.0}, {0.0, 0.0}, {2.0, 2.0}};
  CHECK(code_of([&] { covered_area_exact(pts, cfg); }) == ErrorCode::Unsupported);
  const auto rep = coverage_report(pts, cfg);
  CHECK(rep.method == CoverageMethod::Raster);
  CHECK(std::abs(rep.score - kPi * cfg.rho * cfg.rho) < 1e-3);
  cfg.k = 3;
  CHECK(coverage_report(pts, cfg).score == 0.0);
}

TEST_CASE("coverage gain is non-negative and checks the box") {
  Rng rng(4);
  CoverageConfig cfg;
  const auto pts = random_points(rng, 50);
  const std::vector<Point2> cand{{0.0, 0.0}, {1.0, 1.0}};
  CHECK(coverage_gain(pts, cand, cfg) >= 0.0);
  const std::vector<Point2> same{pts[0]};
  CHECK(coverage_gain(pts, same, cfg) == doctest::Approx(0.0).epsilon(1e-12));
  const std::vector<Point2> bad{{5.0, 0.0}};
  CHECK(code_of([&] { coverage_gain(pts, bad, cfg); }) == ErrorCode::Domain);
}

TEST_CASE("configuration validation") {
  CoverageConfig cfg;
  cfg.rho = 0.0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
  cfg = {};
  cfg.k = 0;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
  cfg = {};
  cfg.box = {0, 0, 0, 1};
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("coverage SVG is a complete document") {
  Rng rng(2);
  const auto pts = random_points(rng, 30, -1.0, 1.0);
  const auto vd = geom::build_voronoi(pts, geom::Box{});
  const std::vector<PointLayer> layers{{pts, "black", "dot", 1.5, "data"}};
  const std::string svg = coverage_svg(vd, 0.08, layers, 50.0, true);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
  CoverageConfig cfg;
  cfg.k = 2;
  const std::string raster = raster_coverage_svg(pts, cfg, layers);
  CHECK(raster.substr(raster.size() - 7) == "</svg>\n");
}
