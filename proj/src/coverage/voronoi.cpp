#include "coverage/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "common/error.hpp"

namespace fairgen::geom {

double VoronoiDiagram::total_cell_area() const {
  double s = 0.0;
  for (const auto& c : cells) s += polygon_area(c);
  return s;
}

namespace {

struct KeyHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const noexcept {
    return std::hash<std::int64_t>()(k.first * 0x9E3779B97F4A7C15LL) ^ std::hash<std::int64_t>()(k.second);
  }
};

// Uniform bucket grid over a rectangle.
class BucketGrid {
 public:
  BucketGrid(std::span<const Point2> pts, double xmin, double ymin, double xmax, double ymax) {
    const double w = std::max(xmax - xmin, 1e-12);
    const double h = std::max(ymax - ymin, 1e-12);
    const double target = std::max<double>(1.0, std::sqrt(static_cast<double>(pts.size())));
    cell_ = std::max(w, h) / target;
    nx_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(w / cell_)));
    ny_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(h / cell_)));
    x0_ = xmin;
    y0_ = ymin;
    start_.assign(static_cast<std::size_t>(nx_ * ny_ + 1), 0);
    std::vector<std::size_t> cell_of(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cell_of[i] = flat(cx(pts[i].x), cy(pts[i].y));
      ++start_[cell_of[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    items_.resize(pts.size());
    auto fill = start_;
    for (std::size_t i = 0; i < pts.size(); ++i) items_[fill[cell_of[i]]++] = i;
  }

  std::int64_t cx(double x) const { return std::clamp<std::int64_t>(static_cast<std::int64_t>((x - x0_) / cell_), 0, nx_ - 1); }
  std::int64_t cy(double y) const { return std::clamp<std::int64_t>(static_cast<std::int64_t>((y - y0_) / cell_), 0, ny_ - 1); }
  std::int64_t nx() const { return nx_; }
  std::int64_t ny() const { return ny_; }
  double cell() const { return cell_; }

  template <typename F>
  void for_each_in(std::int64_t ix, std::int64_t iy, F&& f) const {
    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return;
    const std::size_t c = flat(ix, iy);
    for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) f(items_[k]);
  }

  // Visits cells at Chebyshev distance exactly r from (ix, iy).
  template <typename F>
  void for_each_ring(std::int64_t ix, std::int64_t iy, std::int64_t r, F&& f) const {
    if (r == 0) {
      for_each_in(ix, iy, f);
      return;
    }
    for (std::int64_t dx = -r; dx <= r; ++dx) {
      for_each_in(ix + dx, iy - r, f);
      for_each_in(ix + dx, iy + r, f);
    }
    for (std::int64_t dy = -r + 1; dy <= r - 1; ++dy) {
      for_each_in(ix - r, iy + dy, f);
      for_each_in(ix + r, iy + dy, f);
    }
  }

 private:
  std::size_t flat(std::int64_t ix, std::int64_t iy) const { return static_cast<std::size_t>(iy * nx_ + ix); }

  double cell_ = 1.0;
  double x0_ = 0.0;
  double y0_ = 0.0;
  std::int64_t nx_ = 1;
  std::int64_t ny_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

double max_radius2(const Polygon& poly, Point2 site) {
  double r2 = 0.0;
  for (const auto& v : poly.v) r2 = std::max(r2, dist2(v, site));
  return r2;
}

}  // namespace

std::pair<std::vector<Point2>, std::vector<std::size_t>> deduplicate_sites(std::span<const Point2> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].x != points[b].x) return points[a].x < points[b].x;
    if (points[a].y != points[b].y) return points[a].y < points[b].y;
    return a < b;
  });

  // Hash on a lattice of pitch kMergeDistance; merges look at the 3x3 block.
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, KeyHash> lattice;
  std::vector<Point2> sites;
  std::vector<std::size_t> site_of(points.size());
  const double merge2 = kMergeDistance * kMergeDistance;
  for (std::size_t idx : order) {
    const Point2 p = points[idx];
    const auto kx = static_cast<std::int64_t>(std::floor(p.x / kMergeDistance));
    const auto ky = static_cast<std::int64_t>(std::floor(p.y / kMergeDistance));
    std::size_t found = SIZE_MAX;
    for (std::int64_t dx = -1; dx <= 1 && found == SIZE_MAX; ++dx) {
      for (std::int64_t dy = -1; dy <= 1 && found == SIZE_MAX; ++dy) {
        auto it = lattice.find({kx + dx, ky + dy});
        if (it == lattice.end()) continue;
        for (std::size_t s : it->second) {
          if (dist2(sites[s], p) < merge2) {
            found = s;
            break;
          }
        }
      }
    }
    if (found == SIZE_MAX) {
      found = sites.size();
      sites.push_back(p);
      lattice[{kx, ky}].push_back(found);
    }
    site_of[idx] = found;
  }
  return {std::move(sites), std::move(site_of)};
}

VoronoiDiagram build_voronoi(std::span<const Point2> points, const Box& box) {
  require(box.width() > 0.0 && box.height() > 0.0, ErrorCode::InvalidArgument, "Voronoi box must have positive area");
  for (const auto& p : points)
    require(std::isfinite(p.x) && std::isfinite(p.y), ErrorCode::Domain, "non-finite Voronoi site");
  require(std::any_of(points.begin(), points.end(), [&](Point2 p) { return box.contains(p); }), ErrorCode::Domain,
          "no Voronoi site lies inside the box");

  VoronoiDiagram vd;
  vd.box = box;
  std::tie(vd.sites, vd.site_of_input) = deduplicate_sites(points);
  const auto& sites = vd.sites;
  const std::size_t n = sites.size();

  double xmin = box.xmin, ymin = box.ymin, xmax = box.xmax, ymax = box.ymax;
  for (const auto& s : sites) {
    xmin = std::min(xmin, s.x);
    ymin = std::min(ymin, s.y);
    xmax = std::max(xmax, s.x);
    ymax = std::max(ymax, s.y);
  }
  BucketGrid grid(sites, xmin, ymin, xmax, ymax);
  const std::int64_t max_ring = std::max(grid.nx(), grid.ny());
  const Polygon box_poly = box_polygon(box);

  using Candidate = std::pair<double, std::size_t>;
  std::vector<Candidate> heap;  // min-heap on squared distance
  const auto later = std::greater<Candidate>{};
  vd.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 s = sites[i];
    Polygon cell = box_poly;
    double r2 = max_radius2(cell, s);
    heap.clear();
    const std::int64_t ix = grid.cx(s.x), iy = grid.cy(s.y);

    for (std::int64_t ring = 0;; ++ring) {
      double bound2 = std::numeric_limits<double>::infinity();
      if (ring <= max_ring) {
        grid.for_each_ring(ix, iy, ring, [&](std::size_t j) {
          if (j == i) return;
          heap.emplace_back(dist2(s, sites[j]), j);
          std::push_heap(heap.begin(), heap.end(), later);
        });
        const double bound = static_cast<double>(ring) * grid.cell();
        bound2 = bound * bound;
      }
      bool done = false;
      while (!heap.empty() && heap.front().first <= bound2) {
        const auto [d2, j] = heap.front();
        if (d2 >= 4.0 * r2) {
          done = true;
          break;
        }
        std::pop_heap(heap.begin(), heap.end(), later);
        heap.pop_back();
        const Point2 t = sites[j];
        const Point2 normal = t - s;
        cell = clip_halfplane(cell, normal, dot(0.5 * (s + t), normal), static_cast<int>(j));
        if (cell.empty()) {
          done = true;
          break;
        }
        r2 = max_radius2(cell, s);
      }
      if (done || bound2 >= 4.0 * r2 || (ring > max_ring && heap.empty())) break;
    }
    vd.cells[i] = std::move(cell);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (int label : vd.cells[i].labels) {
      if (label == Polygon::kBoxEdge) continue;
      const auto j = static_cast<std::size_t>(label);
      vd.adjacency.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(vd.adjacency.begin(), vd.adjacency.end());
  vd.adjacency.erase(std::unique(vd.adjacency.begin(), vd.adjacency.end()), vd.adjacency.end());
  return vd;
}

}  // namespace fairgen::geom
