#pragma once

#include <span>
#include <sstream>
#include <string>
#include <string_view>

#include "coverage/geometry.hpp"

namespace fairgen {

/// Minimal SVG writer. World coordinates (y up) map onto pixels (y down)
/// through a fixed scale; everything else is passed through as attributes.
class SvgCanvas {
 public:
  SvgCanvas(const geom::Box& view, double pixels_per_unit, double margin = 40.0)
      : view_(view), scale_(pixels_per_unit), margin_(margin) {}

  double px(double x) const { return margin_ + (x - view_.xmin) * scale_; }
  double py(double y) const { return margin_ + (view_.ymax - y) * scale_; }
  double width() const { return view_.width() * scale_ + 2.0 * margin_; }
  double height() const { return view_.height() * scale_ + 2.0 * margin_; }
  double scale() const { return scale_; }

  void raw(std::string_view s) { body_ << s << '\n'; }

  void rect(const geom::Box& b, std::string_view style) {
    body_ << "<rect x=\"" << px(b.xmin) << "\" y=\"" << py(b.ymax) << "\" width=\"" << b.width() * scale_
          << "\" height=\"" << b.height() * scale_ << "\" style=\"" << style << "\"/>\n";
  }

  void polygon(std::span<const geom::Point2> pts, std::string_view style, std::string_view extra = {}) {
    body_ << "<polygon points=\"";
    for (const auto& p : pts) body_ << px(p.x) << ',' << py(p.y) << ' ';
    body_ << "\" style=\"" << style << "\"" << (extra.empty() ? "" : " ") << extra << "/>\n";
  }

  void polyline(std::span<const geom::Point2> pts, std::string_view style) {
    body_ << "<polyline points=\"";
    for (const auto& p : pts) body_ << px(p.x) << ',' << py(p.y) << ' ';
    body_ << "\" style=\"" << style << "\"/>\n";
  }

  /// Circle with a radius in world units.
  void circle(geom::Point2 c, double r, std::string_view style, std::string_view extra = {}) {
    body_ << "<circle cx=\"" << px(c.x) << "\" cy=\"" << py(c.y) << "\" r=\"" << r * scale_ << "\" style=\"" << style
          << "\"" << (extra.empty() ? "" : " ") << extra << "/>\n";
  }

  /// Fixed-pixel-size marker: "dot", "cross" or "diamond".
  void marker(geom::Point2 c, std::string_view shape, double size, std::string_view color) {
    const double x = px(c.x), y = py(c.y);
    if (shape == "cross") {
      body_ << "<path d=\"M" << x - size << ',' << y - size << " L" << x + size << ',' << y + size << " M" << x - size
            << ',' << y + size << " L" << x + size << ',' << y - size << "\" style=\"stroke:" << color
            << ";stroke-width:1.5\"/>\n";
    } else if (shape == "diamond") {
      body_ << "<path d=\"M" << x << ',' << y - size << " L" << x + size << ',' << y << " L" << x << ',' << y + size
            << " L" << x - size << ',' << y << " Z\" style=\"fill:" << color << ";stroke:black;stroke-width:0.8\"/>\n";
    } else {
      body_ << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << size << "\" style=\"fill:" << color
            << "\"/>\n";
    }
  }

  void text(double pixel_x, double pixel_y, std::string_view s, std::string_view style = "font:12px sans-serif") {
    body_ << "<text x=\"" << pixel_x << "\" y=\"" << pixel_y << "\" style=\"" << style << "\">" << escape(s)
          << "</text>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width() << "\" height=\"" << height()
        << "\" viewBox=\"0 0 " << width() << ' ' << height() << "\">\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

  static std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  }

 private:
  geom::Box view_;
  double scale_;
  double margin_;
  std::ostringstream body_;
};

}  // namespace fairgen
