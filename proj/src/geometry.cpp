#include "mortar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mortar {

Panel Panel::rectangle(const Vec2& lo, const Vec2& hi) {
  if (!(hi(0) > lo(0) && hi(1) > lo(1))) throw std::invalid_argument("Panel: degenerate rectangle");
  Panel p;
  p.shape = Shape::Rectangle;
  p.v = {lo, Vec2(hi(0), lo(1)), hi, Vec2(lo(0), hi(1))};
  return p;
}

Panel Panel::triangle(const Vec2& a, const Vec2& b, const Vec2& c) {
  Panel p;
  p.shape = Shape::Triangle;
  double s = cross(b - a, c - a);
  if (s == 0) throw std::invalid_argument("Panel: degenerate triangle");
  p.v = s > 0 ? Polygon{a, b, c} : Polygon{a, c, b};
  return p;
}

Vec2 Panel::lo() const {
  Vec2 r = v[0];
  for (const auto& x : v) r = r.cwiseMin(x);
  return r;
}

Vec2 Panel::hi() const {
  Vec2 r = v[0];
  for (const auto& x : v) r = r.cwiseMax(x);
  return r;
}

double Panel::area() const { return polygon_area(v); }

double Panel::diameter() const {
  double d = 0;
  for (const auto& a : v)
    for (const auto& b : v) d = std::max(d, (a - b).norm());
  return d;
}

double Panel::longest_edge() const {
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, (v[(i + 1) % v.size()] - v[i]).norm());
  return d;
}

Vec2 Panel::centroid() const {
  if (is_rect()) return 0.5 * (lo() + hi());
  return (v[0] + v[1] + v[2]) / 3.0;
}

Vec2 Panel::map(const Vec2& ref) const {
  if (is_rect()) return lo() + (hi() - lo()).cwiseProduct(ref);
  return v[0] + ref(0) * (v[1] - v[0]) + ref(1) * (v[2] - v[0]);
}

double Panel::jacobian() const {
  if (is_rect()) return area();
  return 2.0 * area();
}

Panel Panel::scaled(double c) const {
  Panel p = *this;
  for (auto& x : p.v) x *= c;
  return p;
}

Panel Panel::translated(const Vec2& t) const {
  Panel p = *this;
  for (auto& x : p.v) x += t;
  return p;
}

std::vector<Panel> Panel::children() const {
  if (is_rect()) {
    Vec2 a = lo(), b = hi(), m = 0.5 * (a + b);
    return {rectangle(a, m), rectangle(Vec2(m(0), a(1)), Vec2(b(0), m(1))), rectangle(m, b),
            rectangle(Vec2(a(0), m(1)), Vec2(m(0), b(1)))};
  }
  Vec2 a = v[0], b = v[1], c = v[2];
  Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  return {triangle(a, ab, ca), triangle(ab, b, bc), triangle(ca, bc, c), triangle(bc, ca, ab)};
}

double cross(const Vec2& a, const Vec2& b) { return a(0) * b(1) - a(1) * b(0); }

double polygon_area(const Polygon& p) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * s;
}

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double tol) {
  return point_segment_distance(p, a, b) <= tol;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 d = b - a;
  double L2 = d.squaredNorm();
  double t = L2 > 0 ? std::clamp((p - a).dot(d) / L2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

bool point_in_convex(const Vec2& p, const Polygon& poly, double tol) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    Vec2 e = b - a;
    if (cross(e, p - a) < -tol * e.norm()) return false;
  }
  return true;
}

namespace {
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  auto on = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p(0), q(0)) <= r(0) && r(0) <= std::max(p(0), q(0)) && std::min(p(1), q(1)) <= r(1) &&
           r(1) <= std::max(p(1), q(1));
  };
  if (d1 == 0 && on(a, b, c)) return true;
  if (d2 == 0 && on(a, b, d)) return true;
  if (d3 == 0 && on(c, d, a)) return true;
  if (d4 == 0 && on(c, d, b)) return true;
  return false;
}
}  // namespace

double polygon_distance(const Polygon& p, const Polygon& q) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      if (segments_intersect(p[i], p[(i + 1) % p.size()], q[j], q[(j + 1) % q.size()])) return 0.0;
  if (point_in_convex(p[0], q, 0.0) || point_in_convex(q[0], p, 0.0)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) {
      d = std::min(d, point_segment_distance(p[i], q[j], q[(j + 1) % q.size()]));
      d = std::min(d, point_segment_distance(q[j], p[i], p[(i + 1) % p.size()]));
    }
  return d;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
    const Vec2& a = clip[i];
    const Vec2& b = clip[(i + 1) % clip.size()];
    Vec2 e = b - a;
    Polygon in;
    in.swap(out);
    for (std::size_t k = 0; k < in.size(); ++k) {
      const Vec2& p = in[k];
      const Vec2& q = in[(k + 1) % in.size()];
      double sp = cross(e, p - a), sq = cross(e, q - a);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) {
        double t = sp / (sp - sq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  return out;
}

Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i - 1] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

Polygon minkowski_difference(const Polygon& p, const Polygon& q) {
  std::vector<Vec2> pts;
  for (const auto& a : p)
    for (const auto& b : q) pts.push_back(a - b);
  return convex_hull(std::move(pts));
}

}  // namespace mortar
