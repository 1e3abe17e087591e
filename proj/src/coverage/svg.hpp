#pragma once

#include <span>
#include <string>
#include <vector>

#include "coverage/coverage.hpp"

namespace fairgen {

struct PointLayer {
  std::vector<Point2> points;
  std::string color = "black";
  std::string shape = "dot";  // dot | cross | diamond
  double size = 1.5;
  std::string label;
};

/// Covered region as per-cell clipped disks over the property scatter.
std::string coverage_svg(const geom::VoronoiDiagram& diagram, double rho, std::span<const PointLayer> layers,
                         double pixels_per_unit = 100.0, bool draw_cells = false);

/// Covered region of the raster path (any k), one rectangle per run of
/// covered cells along each row.
std::string raster_coverage_svg(std::span<const Point2> points, const CoverageConfig& config,
                                std::span<const PointLayer> layers, double pitch = 0.02,
                                double pixels_per_unit = 100.0);

}  // namespace fairgen
