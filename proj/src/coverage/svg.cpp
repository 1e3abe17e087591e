#include "coverage/svg.hpp"

#include <cstdio>

#include "common/svg.hpp"

namespace fairgen {

namespace {

void draw_layers(SvgCanvas& svg, std::span<const PointLayer> layers) {
  double legend_y = 16.0;
  for (const auto& layer : layers) {
    for (const auto& p : layer.points) svg.marker(p, layer.shape, layer.size, layer.color);
    if (!layer.label.empty()) {
      svg.text(12.0, legend_y, layer.label, "font:12px sans-serif;fill:" + layer.color);
      legend_y += 14.0;
    }
  }
}

}  // namespace

std::string coverage_svg(const geom::VoronoiDiagram& diagram, double rho, std::span<const PointLayer> layers,
                         double pixels_per_unit, bool draw_cells) {
  SvgCanvas svg(diagram.box, pixels_per_unit);
  svg.rect(diagram.box, "fill:white;stroke:black;stroke-width:1");

  svg.raw("<defs>");
  for (std::size_t i = 0; i < diagram.cells.size(); ++i) {
    if (diagram.cells[i].empty()) continue;
    char id[32];
    std::snprintf(id, sizeof(id), "cell%zu", i);
    svg.raw(std::string("<clipPath id=\"") + id + "\">");
    svg.polygon(diagram.cells[i].v, "fill:black");
    svg.raw("</clipPath>");
  }
  svg.raw("</defs>");

  for (std::size_t i = 0; i < diagram.cells.size(); ++i) {
    if (diagram.cells[i].empty()) continue;
    char attr[48];
    std::snprintf(attr, sizeof(attr), "clip-path=\"url(#cell%zu)\"", i);
    svg.circle(diagram.sites[i], rho, "fill:#9ecae1;stroke:#3182bd;stroke-width:0.6", attr);
    if (draw_cells) svg.polygon(diagram.cells[i].v, "fill:none;stroke:#bbbbbb;stroke-width:0.3");
  }

  draw_layers(svg, layers);
  return svg.str();
}

std::string raster_coverage_svg(std::span<const Point2> points, const CoverageConfig& config,
                                std::span<const PointLayer> layers, double pitch, double pixels_per_unit) {
  const RasterMask mask = raster_mask(points, config, pitch);
  SvgCanvas svg(config.box, pixels_per_unit);
  svg.rect(config.box, "fill:white;stroke:black;stroke-width:1");
  for (std::size_t j = 0; j < mask.ny; ++j) {
    std::size_t i = 0;
    while (i < mask.nx) {
      if (!mask.covered[j * mask.nx + i]) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < mask.nx && mask.covered[j * mask.nx + i]) ++i;
      const double y0 = config.box.ymin + static_cast<double>(j) * mask.hy;
      svg.rect({config.box.xmin + static_cast<double>(start) * mask.hx, y0,
                config.box.xmin + static_cast<double>(i) * mask.hx, y0 + mask.hy},
               "fill:#9ecae1;stroke:none");
    }
  }
  draw_layers(svg, layers);
  return svg.str();
}

}  // namespace fairgen
