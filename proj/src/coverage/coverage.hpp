#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "coverage/geometry.hpp"
#include "coverage/voronoi.hpp"
#include "problem/dataset.hpp"

namespace fairgen {

using geom::Box;
using geom::Point2;

struct CoverageConfig {
  double rho = 0.08;   // vicinity radius, standardized property units
  unsigned k = 1;      // neighbour threshold
  Box box{-2.0, -2.0, 4.0, 4.0};
  double raster_pitch = 0.005;  // grid pitch of the raster path (k >= 2)

  /// ErrorCode::InvalidArgument unless rho > 0, k >= 1, box has area, pitch > 0.
  void validate() const;
};

enum class CoverageMethod { Exact, Raster };
std::string_view to_string(CoverageMethod m);

struct CoverageReport {
  double score = 0.0;
  std::vector<double> per_cell_area;  // exact path: one entry per deduplicated site
  CoverageMethod method = CoverageMethod::Exact;
};

/// True iff at least k points lie within distance rho of q (boundary inclusive).
bool is_covered(Point2 q, std::span<const Point2> points, double rho, unsigned k);

/// Area of (union of radius-rho disks) intersected with the box, summed cell
/// by cell over the first-order Voronoi diagram. Requires k == 1
/// (ErrorCode::Unsupported otherwise).
CoverageReport covered_area_exact(std::span<const Point2> points, const CoverageConfig& config);
/// Same, reusing an already built diagram.
CoverageReport covered_area_exact(const geom::VoronoiDiagram& diagram, double rho);

/// Raster mask: cell (i, j) has centre (xmin + (i + 0.5) hx, ymin + (j + 0.5) hy).
/// The pitch is adjusted so an integer number of cells tiles the box.
struct RasterMask {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double hx = 0.0;
  double hy = 0.0;
  std::vector<std::uint8_t> covered;  // row-major, j * nx + i

  Point2 center(const Box& box, std::size_t i, std::size_t j) const {
    return {box.xmin + (static_cast<double>(i) + 0.5) * hx, box.ymin + (static_cast<double>(j) + 0.5) * hy};
  }
};

RasterMask raster_mask(std::span<const Point2> points, const CoverageConfig& config, double h);

/// Covered cell centres times cell area. Works for any k.
CoverageReport covered_area_raster(std::span<const Point2> points, const CoverageConfig& config, double h);

/// Exact path when k == 1, raster otherwise.
CoverageReport coverage_report(std::span<const Point2> points, const CoverageConfig& config);

/// Standardized properties of the feasible records as 2-D points.
std::vector<Point2> property_points(const Dataset& data);
std::vector<Point2> to_points(std::span<const PropertyVector> props);

/// S_C of the dataset's feasible records.
double coverage_score(const Dataset& data, const CoverageConfig& config);
double coverage_score(std::span<const Point2> points, const CoverageConfig& config);

/// coverage_score(data + candidates) - coverage_score(data), clamped at 0.
/// ErrorCode::Domain if a candidate lies outside the box.
double coverage_gain(const Dataset& data, std::span<const Point2> candidates, const CoverageConfig& config);
double coverage_gain(std::span<const Point2> points, std::span<const Point2> candidates, const CoverageConfig& config);

}  // namespace fairgen
