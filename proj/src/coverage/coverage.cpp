#include "coverage/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace fairgen {

void CoverageConfig::validate() const {
  require(std::isfinite(rho) && rho > 0.0, ErrorCode::InvalidArgument, "coverage rho must be > 0");
  require(k >= 1, ErrorCode::InvalidArgument, "coverage k must be >= 1");
  require(box.width() > 0.0 && box.height() > 0.0, ErrorCode::InvalidArgument, "coverage box must have positive area");
  require(std::isfinite(raster_pitch) && raster_pitch > 0.0, ErrorCode::InvalidArgument, "raster pitch must be > 0");
}

std::string_view to_string(CoverageMethod m) { return m == CoverageMethod::Exact ? "exact" : "raster"; }

bool is_covered(Point2 q, std::span<const Point2> points, double rho, unsigned k) {
  const double r2 = rho * rho;
  unsigned hits = 0;
  for (const auto& t : points) {
    if (geom::dist2(q, t) <= r2 && ++hits >= k) return true;
  }
  return false;
}

CoverageReport covered_area_exact(const geom::VoronoiDiagram& diagram, double rho) {
  CoverageReport rep;
  rep.method = CoverageMethod::Exact;
  rep.per_cell_area.resize(diagram.sites.size());
  for (std::size_t i = 0; i < diagram.sites.size(); ++i) {
    rep.per_cell_area[i] = geom::disk_polygon_area(diagram.cells[i], diagram.sites[i], rho);
    rep.score += rep.per_cell_area[i];
  }
  return rep;
}

CoverageReport covered_area_exact(std::span<const Point2> points, const CoverageConfig& config) {
  config.validate();
  if (config.k != 1)
    fail(ErrorCode::Unsupported, "exact covered area supports k = 1 only; use the raster estimator for k >= 2");
  return covered_area_exact(geom::build_voronoi(points, config.box), config.rho);
}

RasterMask raster_mask(std::span<const Point2> points, const CoverageConfig& config, double h) {
  config.validate();
  require(std::isfinite(h) && h > 0.0, ErrorCode::InvalidArgument, "raster pitch must be > 0");
  const Box& box = config.box;
  RasterMask m;
  m.nx = static_cast<std::size_t>(std::max<long long>(1, std::llround(box.width() / h)));
  m.ny = static_cast<std::size_t>(std::max<long long>(1, std::llround(box.height() / h)));
  m.hx = box.width() / static_cast<double>(m.nx);
  m.hy = box.height() / static_cast<double>(m.ny);

  // Splat each point's disk into a hit counter, then threshold at k.
  std::vector<std::uint32_t> hits(m.nx * m.ny, 0);
  const double r2 = config.rho * config.rho;
  auto range = [](double c, double lo, double pitch, double rho, std::size_t n) {
    const double a = std::ceil((c - rho - lo) / pitch - 0.5);
    const double b = std::floor((c + rho - lo) / pitch - 0.5);
    const auto first = static_cast<long long>(std::max(a - 1.0, 0.0));
    const auto last = static_cast<long long>(std::min(b + 1.0, static_cast<double>(n) - 1.0));
    return std::pair<long long, long long>{first, last};
  };
  for (const auto& p : points) {
    if (p.x + config.rho < box.xmin || p.x - config.rho > box.xmax || p.y + config.rho < box.ymin ||
        p.y - config.rho > box.ymax)
      continue;
    const auto [i0, i1] = range(p.x, box.xmin, m.hx, config.rho, m.nx);
    const auto [j0, j1] = range(p.y, box.ymin, m.hy, config.rho, m.ny);
    for (long long j = j0; j <= j1; ++j) {
      for (long long i = i0; i <= i1; ++i) {
        const Point2 c = m.center(box, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        if (geom::dist2(c, p) <= r2) ++hits[static_cast<std::size_t>(j) * m.nx + static_cast<std::size_t>(i)];
      }
    }
  }
  m.covered.resize(hits.size());
  for (std::size_t c = 0; c < hits.size(); ++c) m.covered[c] = hits[c] >= config.k ? 1 : 0;
  return m;
}

CoverageReport covered_area_raster(std::span<const Point2> points, const CoverageConfig& config, double h) {
  const RasterMask m = raster_mask(points, config, h);
  std::size_t count = 0;
  for (auto c : m.covered) count += c;
  CoverageReport rep;
  rep.method = CoverageMethod::Raster;
  rep.score = static_cast<double>(count) * m.hx * m.hy;
  return rep;
}

CoverageReport coverage_report(std::span<const Point2> points, const CoverageConfig& config) {
  config.validate();
  if (config.k == 1) return covered_area_exact(points, config);
  return covered_area_raster(points, config, config.raster_pitch);
}

std::vector<Point2> to_points(std::span<const PropertyVector> props) {
  std::vector<Point2> out;
  out.reserve(props.size());
  for (const auto& v : props) {
    require(v.size() == 2, ErrorCode::Unsupported, "coverage geometry needs a 2-dimensional property space");
    out.push_back({v[0], v[1]});
  }
  return out;
}

std::vector<Point2> property_points(const Dataset& data) { return to_points(data.feasible_std_properties()); }

double coverage_score(std::span<const Point2> points, const CoverageConfig& config) {
  require(!points.empty(), ErrorCode::InvalidArgument, "coverage of an empty dataset");
  return coverage_report(points, config).score;
}

double coverage_score(const Dataset& data, const CoverageConfig& config) {
  return coverage_score(property_points(data), config);
}

double coverage_gain(std::span<const Point2> points, std::span<const Point2> candidates, const CoverageConfig& config) {
  for (const auto& c : candidates)
    require(config.box.contains(c), ErrorCode::Domain, "coverage candidate outside the scoring box");
  std::vector<Point2> merged(points.begin(), points.end());
  merged.insert(merged.end(), candidates.begin(), candidates.end());
  const double after = coverage_score(merged, config);
  const double before = coverage_score(points, config);
  return std::max(0.0, after - before);
}

double coverage_gain(const Dataset& data, std::span<const Point2> candidates, const CoverageConfig& config) {
  return coverage_gain(property_points(data), candidates, config);
}

}  // namespace fairgen
