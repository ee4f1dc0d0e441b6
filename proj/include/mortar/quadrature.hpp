#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

namespace mortar {

// Gauss-Legendre rule on [0,1].
template <typename Scalar>
struct GaussRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w;
  int size() const { return static_cast<int>(x.size()); }
};

// Nodes by Newton iteration on the Legendre recurrence, mapped to [0,1].
template <typename Scalar>
GaussRule<Scalar> gauss_legendre(int n) {
  using std::abs;
  using std::cos;
  GaussRule<Scalar> r;
  r.x.resize(n);
  r.w.resize(n);
  const Scalar pi = Scalar(3.14159265358979323846264338327950288L);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar t = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 1;
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = 1, p1 = t;
      for (int k = 2; k <= n; ++k) {
        Scalar pk = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (t * p1 - p0) / (t * t - 1);
      Scalar dt = p1 / dp;
      t -= dt;
      if (abs(dt) < Scalar(1e-17)) break;
    }
    {
      Scalar p0 = 1, p1 = t;
      for (int k = 2; k <= n; ++k) {
        Scalar pk = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (t * p1 - p0) / (t * t - 1);
    }
    Scalar wt = Scalar(2) / ((1 - t * t) * dp * dp);
    r.x(i) = (1 - t) / 2;
    r.x(n - 1 - i) = (1 + t) / 2;
    r.w(i) = wt / 2;
    r.w(n - 1 - i) = wt / 2;
  }
  return r;
}

// Cached double-precision rules, n in [1, 64].
const GaussRule<double>& gauss(int n);

// Collapsed (Duffy) rule on the reference triangle {(s,t): s,t >= 0, s+t <= 1}.
// Exact for total degree 2n-2.
struct TriangleRule {
  std::vector<Eigen::Vector2d> x;
  std::vector<double> w;
};
const TriangleRule& triangle_rule(int n);

// Gauss-Kronrod 7/15 on [a,b]: returns (K15 value, |K15 - G7|).
template <typename F>
std::pair<double, double> gauss_kronrod15(F&& f, double a, double b);

// Adaptive bisection driven by gauss_kronrod15 until the summed error estimate
// is below max(abs_tol, rel_tol*|I|) or max_intervals is reached.
struct AdaptiveResult {
  double value = 0;
  double error = 0;
  int intervals = 0;
  bool converged = false;
};
template <typename F>
AdaptiveResult adaptive_gk15(F&& f, double a, double b, double rel_tol, double abs_tol,
                             int max_intervals = 2000);

namespace detail {
extern const double kronrod_x[8];
extern const double kronrod_wk[8];
extern const double kronrod_wg[4];
}  // namespace detail

template <typename F>
std::pair<double, double> gauss_kronrod15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double k = fc * detail::kronrod_wk[7];
  double g = fc * detail::kronrod_wg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * detail::kronrod_x[j];
    double s = f(c - dx) + f(c + dx);
    k += detail::kronrod_wk[j] * s;
    if (j % 2 == 1) g += detail::kronrod_wg[j / 2] * s;
  }
  return {k * h, std::abs((k - g) * h)};
}

template <typename F>
AdaptiveResult adaptive_gk15(F&& f, double a, double b, double rel_tol, double abs_tol,
                             int max_intervals) {
  struct Piece {
    double a, b, v, e;
  };
  std::vector<Piece> pieces;
  auto [v0, e0] = gauss_kronrod15(f, a, b);
  pieces.push_back({a, b, v0, e0});
  AdaptiveResult res;
  for (;;) {
    double total = 0, err = 0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      total += pieces[i].v;
      err += pieces[i].e;
      if (pieces[i].e > pieces[worst].e) worst = i;
    }
    res.value = total;
    res.error = err;
    res.intervals = static_cast<int>(pieces.size());
    if (err <= std::max(abs_tol, rel_tol * std::abs(total))) {
      res.converged = true;
      return res;
    }
    if (static_cast<int>(pieces.size()) >= max_intervals) return res;
    Piece p = pieces[worst];
    double m = 0.5 * (p.a + p.b);
    auto [vl, el] = gauss_kronrod15(f, p.a, m);
    auto [vr, er] = gauss_kronrod15(f, m, p.b);
    pieces[worst] = {p.a, m, vl, el};
    pieces.push_back({m, p.b, vr, er});
  }
}

}  // namespace mortar
