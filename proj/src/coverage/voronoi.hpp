#pragma once

#include <span>
#include <utility>
#include <vector>

#include "coverage/geometry.hpp"

namespace fairgen::geom {

/// Sites closer than this are treated as one site.
inline constexpr double kMergeDistance = 1e-9;

/// First-order Voronoi diagram of a point set, each cell clipped to a box.
struct VoronoiDiagram {
  Box box;
  std::vector<Point2> sites;               // deduplicated, lexicographically sorted
  std::vector<Polygon> cells;              // cells[i] belongs to sites[i]; empty if it misses the box
  std::vector<std::pair<std::size_t, std::size_t>> adjacency;  // i < j
  std::vector<std::size_t> site_of_input;  // input index -> site index

  double total_cell_area() const;
};

/// Deduplicated, sorted sites plus the input-to-site map.
std::pair<std::vector<Point2>, std::vector<std::size_t>> deduplicate_sites(std::span<const Point2> points);

/// Builds each cell by clipping the box with bisectors of nearby sites in
/// increasing distance order, stopping once the next candidate is farther
/// than twice the cell's radius (no later bisector can cut it). Neighbour
/// candidates come from a uniform bucket grid, so construction is close to
/// O(n log n) for bounded density contrast.
///
/// Sites outside the box are kept (their clipped cells may still overlap
/// it). Throws ErrorCode::Domain if no site lies inside the box or any
/// coordinate is non-finite.
VoronoiDiagram build_voronoi(std::span<const Point2> points, const Box& box);

}  // namespace fairgen::geom
