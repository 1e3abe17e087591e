#include "coverage/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace fairgen::geom {

Polygon box_polygon(const Box& box) {
  Polygon p;
  p.v = {{box.xmin, box.ymin}, {box.xmax, box.ymin}, {box.xmax, box.ymax}, {box.xmin, box.ymax}};
  p.labels.assign(4, Polygon::kBoxEdge);
  return p;
}

Polygon clip_halfplane(const Polygon& poly, Point2 normal, double offset, int label) {
  Polygon out;
  const std::size_t n = poly.v.size();
  if (n == 0) return out;
  out.v.reserve(n + 1);
  out.labels.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly.v[i];
    const Point2 b = poly.v[(i + 1) % n];
    const double da = dot(a, normal) - offset;
    const double db = dot(b, normal) - offset;
    const bool a_in = da <= 0.0;
    const bool b_in = db <= 0.0;
    if (a_in) {
      out.v.push_back(a);
      out.labels.push_back(poly.labels[i]);
      if (!b_in) {
        const double t = da / (da - db);
        out.v.push_back(a + t * (b - a));
        out.labels.push_back(label);
      }
    } else if (b_in) {
      const double t = da / (da - db);
      out.v.push_back(a + t * (b - a));
      out.labels.push_back(poly.labels[i]);
    }
  }
  if (out.v.size() < 3) return {};
  return out;
}

double polygon_area(const Polygon& poly) {
  double s = 0.0;
  const std::size_t n = poly.v.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(poly.v[i], poly.v[(i + 1) % n]);
  return 0.5 * s;
}

namespace {

double sector(Point2 a, Point2 b, double r) { return 0.5 * r * r * std::atan2(cross(a, b), dot(a, b)); }

// Signed area of triangle (0, a, b) intersected with the disk of radius r at 0.
double triangle_disk(Point2 a, Point2 b, double r) {
  const double r2 = r * r;
  const double aa = norm2(a);
  const double bb = norm2(b);
  const bool a_in = aa <= r2;
  const bool b_in = bb <= r2;
  if (a_in && b_in) return 0.5 * cross(a, b);

  const Point2 d = b - a;
  const double A = norm2(d);
  if (A == 0.0) return 0.0;
  const double B = dot(a, d);  // half of the usual linear coefficient
  const double C = aa - r2;
  const double disc = B * B - A * C;
  if (disc <= 0.0) return sector(a, b, r);
  const double sq = std::sqrt(disc);
  const double t1 = (-B - sq) / A;
  const double t2 = (-B + sq) / A;

  if (a_in) {
    const Point2 p = a + std::clamp(t2, 0.0, 1.0) * d;
    return 0.5 * cross(a, p) + sector(p, b, r);
  }
  if (b_in) {
    const Point2 p = a + std::clamp(t1, 0.0, 1.0) * d;
    return sector(a, p, r) + 0.5 * cross(p, b);
  }
  if (t1 > 0.0 && t2 < 1.0) {
    const Point2 p1 = a + t1 * d;
    const Point2 p2 = a + t2 * d;
    return sector(a, p1, r) + 0.5 * cross(p1, p2) + sector(p2, b, r);
  }
  return sector(a, b, r);
}

}  // namespace

double disk_polygon_area(const Polygon& poly, Point2 center, double r) {
  const std::size_t n = poly.v.size();
  if (n < 3 || r <= 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += triangle_disk(poly.v[i] - center, poly.v[(i + 1) % n] - center, r);
  return std::max(0.0, s);
}

double lens_area(double r, double s) {
  if (s >= 2.0 * r) return 0.0;
  if (s <= 0.0) return std::numbers::pi * r * r;
  return 2.0 * r * r * std::acos(s / (2.0 * r)) - 0.5 * s * std::sqrt(4.0 * r * r - s * s);
}

}  // namespace fairgen::geom
