#include "oracle.hpp"

#include "mortar/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

using mortar::Panel;
using mortar::Poly2;
using mortar::Vec2;

namespace {

struct Points {
  std::vector<Vec2> x;
  std::vector<double> w;
};

Points rule(const Panel& P, int n) {
  Points r;
  if (P.is_rect()) {
    auto g = mortar::gauss_legendre<double>(n);
    Vec2 lo = P.lo(), d = P.hi() - P.lo();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        r.x.emplace_back(lo(0) + d(0) * g.x(i), lo(1) + d(1) * g.x(j));
        r.w.push_back(d(0) * d(1) * g.w(i) * g.w(j));
      }
    return r;
  }
  // Stroud conical product rule built here from first principles.
  auto g = mortar::gauss_legendre<double>(n);
  double J = 2.0 * P.area();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double u = g.x(i), v = g.x(j);
      Vec2 ref(u, (1 - u) * v);
      r.x.push_back(P.v[0] + ref(0) * (P.v[1] - P.v[0]) + ref(1) * (P.v[2] - P.v[0]));
      r.w.push_back(J * g.w(i) * g.w(j) * (1 - u));
    }
  return r;
}

struct Integrator {
  int exponent;
  Poly2 p, q;

  double apply(const Points& a, const Points& b) const {
    double s = 0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      double pi = p(a.x[i]);
      double si = 0;
      for (std::size_t j = 0; j < b.x.size(); ++j) {
        double r = (a.x[i] - b.x[j]).norm();
        if (exponent == -1) {
          si += b.w[j] * q(b.x[j]) / r;
        } else {
          double d = pi - q(b.x[j]);
          si += b.w[j] * d * d / (r * r * r);
        }
      }
      s += a.w[i] * (exponent == -1 ? pi * si : si);
    }
    return s;
  }

  double far(const Panel& A, const Panel& B, double ratio) const {
    // Bernstein-ellipse estimate for a pole at normalized distance 2*ratio.
    double delta = 2.0 * ratio;
    double rho = 1.0 + delta + std::sqrt(delta * (2.0 + delta));
    int n = static_cast<int>(std::ceil(36.0 / (2.0 * std::log(rho)))) + 1;
    n = std::clamp(n, 4, 24);
    return apply(rule(A, n), rule(B, n));
  }

  double near(const Panel& A, const Panel& B) const { return apply(rule(A, 4), rule(B, 5)); }

  double recurse(const Panel& A, const Panel& B, int depth) const {
    double diam = std::max(A.diameter(), B.diameter());
    double dist = mortar::polygon_distance(A.v, B.v);
    if (dist >= diam) return far(A, B, dist / diam);
    if (depth == 0) return near(A, B);
    double s = 0;
    auto ca = A.children(), cb = B.children();
    for (const auto& a : ca)
      for (const auto& b : cb) s += recurse(a, b, depth - 1);
    return s;
  }
};

}  // namespace

Result pair_integral(const Panel& P, const Panel& Q, int exponent, const Poly2& p, const Poly2& q, double rel_tol,
                     int min_depth, int max_depth) {
  if (exponent != -1 && exponent != -3) throw std::invalid_argument("oracle: exponent must be -1 or -3");
  Integrator in{exponent, p, q};
  Result res;
  std::vector<std::vector<double>> T;
  for (int d = min_depth; d <= max_depth; ++d) {
    double v = in.recurse(P, Q, d);
    res.levels.push_back(v);
    std::vector<double> row = {v};
    if (!T.empty()) {
      const auto& prev = T.back();
      for (std::size_t j = 1; j <= prev.size(); ++j) {
        double f = std::ldexp(1.0, static_cast<int>(j)) - 1.0;
        row.push_back(row[j - 1] + (row[j - 1] - prev[j - 1]) / f);
      }
    }
    T.push_back(row);
    res.diagonal.push_back(row.back());
    if (res.diagonal.size() >= 2) {
      double a = res.diagonal.back(), b = res.diagonal[res.diagonal.size() - 2];
      res.value = a;
      res.error = std::abs(a - b);
      if (res.error <= rel_tol * std::abs(a)) {
        res.converged = true;
        return res;
      }
    } else {
      res.value = v;
      res.error = std::abs(v);
    }
  }
  return res;
}

}  // namespace oracle
