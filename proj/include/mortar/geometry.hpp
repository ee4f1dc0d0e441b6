#pragma once

#include <Eigen/Dense>

#include <vector>

namespace mortar {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

enum class Shape { Rectangle, Triangle };

// Flat panel: axis-aligned rectangle or triangle, vertices counter-clockwise.
struct Panel {
  Shape shape = Shape::Rectangle;
  Polygon v;

  static Panel rectangle(const Vec2& lo, const Vec2& hi);
  static Panel triangle(const Vec2& a, const Vec2& b, const Vec2& c);

  bool is_rect() const { return shape == Shape::Rectangle; }
  // Rectangle bounds (valid for rectangles; bounding box otherwise).
  Vec2 lo() const;
  Vec2 hi() const;
  double area() const;
  double diameter() const;
  double longest_edge() const;
  Vec2 centroid() const;
  // Affine map from the reference square [0,1]^2 or triangle (s,t).
  Vec2 map(const Vec2& ref) const;
  double jacobian() const;
  Panel scaled(double c) const;
  Panel translated(const Vec2& t) const;
  // Four congruent children.
  std::vector<Panel> children() const;
};

double cross(const Vec2& a, const Vec2& b);
double polygon_area(const Polygon& p);  // signed, positive for CCW
bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double tol);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double polygon_distance(const Polygon& p, const Polygon& q);  // 0 if they intersect
bool point_in_convex(const Vec2& p, const Polygon& poly, double tol);
// Sutherland-Hodgman clipping of a polygon against a convex CCW polygon.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);
Polygon convex_hull(std::vector<Vec2> pts);
// P - Q = {x - y}.
Polygon minkowski_difference(const Polygon& p, const Polygon& q);

}  // namespace mortar
