#pragma once

#include <cmath>
#include <vector>

namespace fairgen::geom {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point2 a) { return dot(a, a); }
inline double dist2(Point2 a, Point2 b) { return norm2(a - b); }

struct Box {
  double xmin = -2.0;
  double ymin = -2.0;
  double xmax = 4.0;
  double ymax = 4.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool contains(Point2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
};

/// Convex polygon, counter-clockwise. labels[i] tags the edge from v[i] to
/// v[i+1]: the index of the neighbouring site that produced it, or kBoxEdge.
struct Polygon {
  static constexpr int kBoxEdge = -1;
  std::vector<Point2> v;
  std::vector<int> labels;

  bool empty() const { return v.size() < 3; }
};

Polygon box_polygon(const Box& box);

/// Keeps the part of poly where dot(q, normal) <= offset; new edges get `label`.
Polygon clip_halfplane(const Polygon& poly, Point2 normal, double offset, int label);

/// Signed shoelace area (positive for counter-clockwise).
double polygon_area(const Polygon& poly);

/// Area of poly intersected with the disk of radius r about center. Exact up
/// to rounding: triangle fan from the centre, each triangle split into
/// straight and circular-sector pieces. Valid for any simple CCW polygon.
double disk_polygon_area(const Polygon& poly, Point2 center, double r);

/// Intersection area of two radius-r disks whose centres are distance s apart.
double lens_area(double r, double s);

}  // namespace fairgen::geom
