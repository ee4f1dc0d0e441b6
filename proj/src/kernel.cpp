#include "mortar/kernel.hpp"

#include "mortar/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace mortar {

const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::Identical: return "identical";
    case PairClass::EdgeAdjacent: return "edge-adjacent";
    case PairClass::VertexAdjacent: return "vertex-adjacent";
    case PairClass::Disjoint: return "disjoint";
  }
  return "unknown";
}

namespace {

double pair_scale(const Panel& P, const Panel& Q) { return std::max(P.diameter(), Q.diameter()); }

bool same_panel(const Panel& P, const Panel& Q, double tol) {
  if (P.shape != Q.shape || P.v.size() != Q.v.size()) return false;
  for (const auto& a : P.v) {
    bool found = false;
    for (const auto& b : Q.v)
      if ((a - b).norm() <= tol) found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace

PanelPairClass classify(const Panel& P, const Panel& Q) {
  const double tol = 1e-12 * pair_scale(P, Q);
  if (same_panel(P, Q, tol)) return {PairClass::Identical, 0.0};
  Polygon common = clip_convex(P.v, Q.v);
  if (!common.empty() && polygon_area(common) > 1e-10 * std::min(P.area(), Q.area()))
    throw InvalidMesh("classify: overlapping panels");
  std::vector<Vec2> touch;
  auto on_boundary = [&](const Vec2& x, const Polygon& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i)
      if (point_on_segment(x, poly[i], poly[(i + 1) % poly.size()], tol)) return true;
    return false;
  };
  for (const auto& x : P.v)
    if (on_boundary(x, Q.v)) touch.push_back(x);
  for (const auto& x : Q.v)
    if (on_boundary(x, P.v)) touch.push_back(x);
  if (touch.empty()) {
    double d = polygon_distance(P.v, Q.v);
    if (d <= tol) throw InvalidMesh("classify: crossing panel edges");
    return {PairClass::Disjoint, d / pair_scale(P, Q)};
  }
  double extent = 0;
  for (const auto& a : touch)
    for (const auto& b : touch) extent = std::max(extent, (a - b).norm());
  return {extent > tol ? PairClass::EdgeAdjacent : PairClass::VertexAdjacent, 0.0};
}

int far_field_order(double ratio, double accuracy) {
  double delta = 2.0 * std::max(ratio, 1e-3);
  double rho = 1.0 + delta + std::sqrt(delta * (2.0 + delta));
  double n = std::log(100.0 / accuracy) / (2.0 * std::log(rho));
  return std::clamp(static_cast<int>(std::ceil(n)), 2, 40);
}

namespace detail {

void panel_points(const Panel& P, int n, Eigen::Matrix<double, Eigen::Dynamic, 2>& x, Eigen::VectorXd& w) {
  if (P.is_rect()) {
    const auto& g = gauss(n);
    Vec2 lo = P.lo(), d = P.hi() - P.lo();
    x.resize(n * n, 2);
    w.resize(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int k = i * n + j;
        x(k, 0) = lo(0) + d(0) * g.x(i);
        x(k, 1) = lo(1) + d(1) * g.x(j);
        w(k) = d(0) * d(1) * g.w(i) * g.w(j);
      }
    return;
  }
  const auto& t = triangle_rule(n);
  const int m = static_cast<int>(t.x.size());
  x.resize(m, 2);
  w.resize(m);
  double J = P.jacobian();
  for (int k = 0; k < m; ++k) {
    x.row(k) = P.map(t.x[k]).transpose();
    w(k) = t.w[k] * J;
  }
}

}  // namespace detail

namespace {

// ---------------------------------------------------------------------------
// H(z) evaluators: accumulate weight * int_{P cap (Q+z)} (density products) dx.

struct SingleLayerEval {
  const std::vector<Poly2>& ps;
  const std::vector<Poly2>& qs;

  template <class Acc>
  void point_set(const Vec2& z, const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, 2>>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& w, double weight, Acc& acc) const {
    const int nq = static_cast<int>(x.rows());
    Eigen::MatrixXd pv(nq, ps.size()), qv(nq, qs.size());
    for (int k = 0; k < nq; ++k) {
      double x1 = x(k, 0), x2 = x(k, 1);
      for (std::size_t a = 0; a < ps.size(); ++a) pv(k, a) = ps[a](x1, x2) * w(k);
      for (std::size_t b = 0; b < qs.size(); ++b) qv(k, b) = qs[b](x1 - z(0), x2 - z(1));
    }
    acc.noalias() += weight * (pv.transpose() * qv);
  }
};

struct SlobodeckijEval {
  const std::vector<Poly2>& ps;
  const std::vector<Poly2>& qs;

  template <class Acc>
  void point_set(const Vec2& z, const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, 2>>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& w, double weight, Acc& acc) const {
    const int nq = static_cast<int>(x.rows());
    Eigen::MatrixXd dv(nq, ps.size()), dw(nq, ps.size());
    for (int k = 0; k < nq; ++k) {
      double x1 = x(k, 0), x2 = x(k, 1);
      for (std::size_t j = 0; j < ps.size(); ++j) {
        dv(k, j) = ps[j](x1, x2) - qs[j](x1 - z(0), x2 - z(1));
        dw(k, j) = dv(k, j) * w(k);
      }
    }
    acc.noalias() += weight * (dw.transpose() * dv);
  }
};

// Rectangle region [lo,hi] (signed lengths allowed) with 3x3 Gauss.
template <class Eval, class Acc>
void region_rect(const Eval& ev, const Vec2& z, const double* lo, const double* hi, double weight, Acc& acc) {
  const auto& g = gauss(3);
  Eigen::Matrix<double, 9, 2> x;
  Eigen::Matrix<double, 9, 1> w;
  double l0 = hi[0] - lo[0], l1 = hi[1] - lo[1];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int k = 3 * i + j;
      x(k, 0) = lo[0] + l0 * g.x(i);
      x(k, 1) = lo[1] + l1 * g.x(j);
      w(k) = l0 * l1 * g.w(i) * g.w(j);
    }
  ev.point_set(z, x, w, weight, acc);
}

// Convex polygon region, fan triangulation with a degree-4 rule.
template <class Eval, class Acc>
void region_polygon(const Eval& ev, const Vec2& z, const Polygon& region, double weight, Acc& acc) {
  if (region.size() < 3) return;
  const auto& t = triangle_rule(3);
  const int m = static_cast<int>(t.x.size());
  const int ntri = static_cast<int>(region.size()) - 2;
  Eigen::Matrix<double, Eigen::Dynamic, 2> x(m * ntri, 2);
  Eigen::VectorXd w(m * ntri);
  for (int tri = 0; tri < ntri; ++tri) {
    const Vec2& a = region[0];
    Vec2 e1 = region[tri + 1] - a, e2 = region[tri + 2] - a;
    double J = cross(e1, e2);
    for (int k = 0; k < m; ++k) {
      Vec2 p = a + t.x[k](0) * e1 + t.x[k](1) * e2;
      x.row(tri * m + k) = p.transpose();
      w(tri * m + k) = t.w[k] * J;
    }
  }
  ev.point_set(z, x, w, weight, acc);
}

// Gradients of the bilinear nodal basis, products integrated axis by axis.
struct BilinearGradEval {
  double a[2], b[2], c[2], d[2];

  BilinearGradEval(const Panel& P, const Panel& Q) {
    Vec2 pl = P.lo(), ph = P.hi(), ql = Q.lo(), qh = Q.hi();
    for (int k = 0; k < 2; ++k) a[k] = pl(k), b[k] = ph(k), c[k] = ql(k), d[k] = qh(k);
  }

  template <class Acc>
  void rect(const Vec2& z, const double* lo, const double* hi, double weight, Acc& acc) const {
    static const double xi[2] = {0.21132486540518711775, 0.78867513459481288225};
    double V[2][2][2], D[2][2][2];
    for (int k = 0; k < 2; ++k) {
      double len = hi[k] - lo[k], hp = b[k] - a[k], hq = d[k] - c[k];
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) V[k][i][j] = 0;
      for (int gq = 0; gq < 2; ++gq) {
        double t = lo[k] + len * xi[gq], y = t - z(k);
        double lp[2] = {(b[k] - t) / hp, (t - a[k]) / hp};
        double lq[2] = {(d[k] - y) / hq, (y - c[k]) / hq};
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) V[k][i][j] += 0.5 * len * lp[i] * lq[j];
      }
      double s = len / (hp * hq);
      D[k][0][0] = s, D[k][1][1] = s, D[k][0][1] = -s, D[k][1][0] = -s;
    }
    static const int ix[4] = {0, 1, 1, 0}, iy[4] = {0, 0, 1, 1};
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q)
        acc(p, q) += weight * (V[0][ix[p]][ix[q]] * D[1][iy[p]][iy[q]] + D[0][ix[p]][ix[q]] * V[1][iy[p]][iy[q]]);
  }
};

template <class Eval>
struct RectAdapter {
  const Eval& ev;
  template <class Acc>
  void rect(const Vec2& z, const double* lo, const double* hi, double weight, Acc& acc) const {
    region_rect(ev, z, lo, hi, weight, acc);
  }
};

// ---------------------------------------------------------------------------
// Cartesian relative-coordinate route for axis-aligned rectangles.

struct AxisPiece {
  double s, t;
  bool lo_from_p, hi_from_p;
};

std::vector<AxisPiece> axis_pieces(double a, double b, double c, double d, double tol) {
  std::vector<double> br = {a - d, b - c};
  for (double x : {a - c, b - d, 0.0})
    if (x > a - d + tol && x < b - c - tol) br.push_back(x);
  for (double& x : br)
    if (std::abs(x) <= tol) x = 0.0;
  std::sort(br.begin(), br.end());
  std::vector<double> u;
  for (double x : br)
    if (u.empty() || x - u.back() > tol) u.push_back(x);
    else if (x == 0.0) u.back() = 0.0;
  std::vector<AxisPiece> pieces;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    double m = 0.5 * (u[i] + u[i + 1]);
    pieces.push_back({u[i], u[i + 1], a >= c + m, b <= d + m});
  }
  return pieces;
}

int duffy_angle_order(double L, double accuracy) {
  double digits = -std::log10(accuracy);
  return std::clamp(static_cast<int>(std::ceil(0.5 * digits + 2.0 + 4.0 * L)), 4, 64);
}

template <class Eval, class Acc>
struct CartesianEngine {
  const Eval& ev;
  KernelKind kind;
  double accuracy;
  double a[2], b[2], c[2], d[2];

  CartesianEngine(const Eval& e, KernelKind k, double acc, const Panel& P, const Panel& Q)
      : ev(e), kind(k), accuracy(acc) {
    Vec2 pl = P.lo(), ph = P.hi(), ql = Q.lo(), qh = Q.hi();
    for (int i = 0; i < 2; ++i) a[i] = pl(i), b[i] = ph(i), c[i] = ql(i), d[i] = qh(i);
  }

  void eval(const Vec2& z, const AxisPiece& p1, const AxisPiece& p2, double weight, Acc& acc) const {
    double lo[2] = {p1.lo_from_p ? a[0] : c[0] + z(0), p2.lo_from_p ? a[1] : c[1] + z(1)};
    double hi[2] = {p1.hi_from_p ? b[0] : d[0] + z(0), p2.hi_from_p ? b[1] : d[1] + z(1)};
    ev.rect(z, lo, hi, weight, acc);
  }

  void run(Acc& acc, double tol) const {
    auto px = axis_pieces(a[0], b[0], c[0], d[0], tol);
    auto py = axis_pieces(a[1], b[1], c[1], d[1], tol);
    for (const auto& p1 : px)
      for (const auto& p2 : py) cell(p1, p2, p1.s, p1.t, p2.s, p2.t, acc, 0);
  }

  void cell(const AxisPiece& p1, const AxisPiece& p2, double s1, double t1, double s2, double t2, Acc& acc,
            int depth) const {
    bool corner = (s1 == 0.0 || t1 == 0.0) && (s2 == 0.0 || t2 == 0.0);
    if (corner) {
      duffy(p1, p2, s1, t1, s2, t2, acc);
      return;
    }
    double dx = s1 > 0 ? s1 : (t1 < 0 ? -t1 : 0.0);
    double dy = s2 > 0 ? s2 : (t2 < 0 ? -t2 : 0.0);
    double dist = std::hypot(dx, dy), diam = std::hypot(t1 - s1, t2 - s2);
    double eta = dist / diam;
    if (eta < 0.5 && depth < 60) {
      double m1 = 0.5 * (s1 + t1), m2 = 0.5 * (s2 + t2);
      cell(p1, p2, s1, m1, s2, m2, acc, depth + 1);
      cell(p1, p2, m1, t1, s2, m2, acc, depth + 1);
      cell(p1, p2, s1, m1, m2, t2, acc, depth + 1);
      cell(p1, p2, m1, t1, m2, t2, acc, depth + 1);
      return;
    }
    int n = std::max(3, far_field_order(eta, accuracy));
    const auto& g = gauss(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec2 z(s1 + (t1 - s1) * g.x(i), s2 + (t2 - s2) * g.x(j));
        double r = z.norm();
        double k = kind == KernelKind::SingleLayer ? 1.0 / r : 1.0 / (r * r * r);
        eval(z, p1, p2, (t1 - s1) * (t2 - s2) * g.w(i) * g.w(j) * k, acc);
      }
  }

  // Cell with the origin at a corner: split along the diagonal, radial
  // variable r in [0,1] and angular variable through t = alpha sinh(s).
  void duffy(const AxisPiece& p1, const AxisPiece& p2, double s1, double t1, double s2, double t2, Acc& acc) const {
    double sg1 = s1 == 0.0 ? 1.0 : -1.0, sg2 = s2 == 0.0 ? 1.0 : -1.0;
    double X = s1 == 0.0 ? t1 : -s1, Y = s2 == 0.0 ? t2 : -s2;
    const auto& gr = gauss(6);
    for (int tri = 0; tri < 2; ++tri) {
      double A = tri == 0 ? X : Y, Bl = tri == 0 ? Y : X;
      double L = std::asinh(Bl / A);
      const auto& gs = gauss(duffy_angle_order(L, accuracy));
      for (int j = 0; j < gs.size(); ++j) {
        double s = L * gs.x(j), sh = std::sinh(s), ch = std::cosh(s);
        for (int i = 0; i < gr.size(); ++i) {
          double r = gr.x(i);
          Vec2 z = tri == 0 ? Vec2(sg1 * A * r, sg2 * A * r * sh) : Vec2(sg1 * A * r * sh, sg2 * A * r);
          double w = gr.w(i) * gs.w(j) * L;
          w *= kind == KernelKind::SingleLayer ? A : 1.0 / (A * r * r * ch * ch);
          eval(z, p1, p2, w, acc);
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Polar relative-coordinate route for general convex panels.

struct Line {
  Vec2 p, d;
};

std::pair<double, double> ray_polygon(const Vec2& e, const Polygon& D) {
  double r0 = 0, r1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < D.size(); ++i) {
    Vec2 E = D[(i + 1) % D.size()] - D[i];
    double al = cross(E, e), be = cross(E, D[i]);
    if (al > 0) r0 = std::max(r0, be / al);
    else if (al < 0) r1 = std::min(r1, be / al);
    else if (be > 0) return {0, 0};
  }
  return {r0, r1};
}

template <class Eval>
struct PolarEngine {
  const Eval& ev;
  KernelKind kind;
  const Panel& P;
  const Panel& Q;
  Polygon D;
  std::vector<Line> lines;
  double scale;
  int rows, cols;

  PolarEngine(const Eval& e, KernelKind k, const Panel& p, const Panel& q, int nr, int nc)
      : ev(e), kind(k), P(p), Q(q), rows(nr), cols(nc) {
    D = minkowski_difference(P.v, Q.v);
    scale = pair_scale(P, Q);
    for (const auto& v : P.v)
      for (std::size_t j = 0; j < Q.v.size(); ++j)
        lines.push_back({v - Q.v[j], Q.v[(j + 1) % Q.v.size()] - Q.v[j]});
    for (const auto& w : Q.v)
      for (std::size_t j = 0; j < P.v.size(); ++j)
        lines.push_back({P.v[j] - w, P.v[(j + 1) % P.v.size()] - P.v[j]});
  }

  void h_at(const Vec2& z, double weight, Eigen::MatrixXd& acc) const {
    Polygon qz = Q.v;
    for (auto& x : qz) x += z;
    Polygon region = clip_convex(P.v, qz);
    if (region.size() < 3) return;
    region_polygon(ev, z, region, weight, acc);
  }

  Eigen::MatrixXd phi(double theta) const {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows, cols);
    Vec2 e(std::cos(theta), std::sin(theta));
    auto [r0, r1] = ray_polygon(e, D);
    if (!(r1 > r0)) return acc;
    std::vector<double> br = {r0, r1};
    for (const auto& l : lines) {
      double den = cross(e, l.d);
      if (std::abs(den) < 1e-14 * l.d.norm()) continue;
      double r = cross(l.p, l.d) / den;
      if (r > r0 && r < r1) br.push_back(r);
    }
    std::sort(br.begin(), br.end());
    const auto& g4 = gauss(4);
    const auto& g8 = gauss(8);
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      double ra = br[i], rb = br[i + 1];
      if (rb - ra <= 1e-15 * scale) continue;
      if (kind == KernelKind::SingleLayer) {
        for (int k = 0; k < g4.size(); ++k) {
          double r = ra + (rb - ra) * g4.x(k);
          h_at(r * e, (rb - ra) * g4.w(k), acc);
        }
      } else if (ra <= 1e-15 * scale) {
        for (int k = 0; k < g4.size(); ++k) {
          double r = rb * g4.x(k);
          h_at(r * e, rb * g4.w(k) / (r * r), acc);
        }
      } else {
        // Geometric pieces of ratio <= 2 keep 1/r^2 well resolved.
        double lo = ra;
        while (lo < rb) {
          double hi = std::min(rb, 2.0 * lo);
          for (int k = 0; k < g8.size(); ++k) {
            double r = lo + (hi - lo) * g8.x(k);
            h_at(r * e, (hi - lo) * g8.w(k) / (r * r), acc);
          }
          lo = hi;
        }
      }
    }
    return acc;
  }

  std::vector<double> angles() const {
    const double tol = 1e-12 * scale;
    std::vector<double> th = {-M_PI, M_PI};
    auto add = [&](const Vec2& x) {
      if (x.norm() > tol) th.push_back(std::atan2(x(1), x(0)));
    };
    for (const auto& v : D) add(v);
    for (const auto& l : lines) {
      // Lines through the origin.
      if (std::abs(cross(l.p, l.d)) <= tol * l.d.norm()) {
        add(l.d);
        add(-l.d);
      }
    }
    for (std::size_t i = 0; i < lines.size(); ++i)
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        double den = cross(lines[i].d, lines[j].d);
        if (std::abs(den) < 1e-14 * lines[i].d.norm() * lines[j].d.norm()) continue;
        double s = cross(lines[j].p - lines[i].p, lines[j].d) / den;
        Vec2 x = lines[i].p + s * lines[i].d;
        if (point_in_convex(x, D, 1e-12)) add(x);
      }
    std::sort(th.begin(), th.end());
    std::vector<double> u;
    for (double t : th)
      if (u.empty() || t - u.back() > 1e-13) u.push_back(t);
    return u;
  }

  Eigen::MatrixXd run(double accuracy) const {
    struct Piece {
      double a, b;
      Eigen::MatrixXd v;
      double e;
    };
    auto gk = [&](double a, double b) {
      const double cx = 0.5 * (a + b), h = 0.5 * (b - a);
      Eigen::MatrixXd fc = phi(cx);
      Eigen::MatrixXd k = fc * detail::kronrod_wk[7], g = fc * detail::kronrod_wg[3];
      for (int j = 0; j < 7; ++j) {
        double dx = h * detail::kronrod_x[j];
        Eigen::MatrixXd s = phi(cx - dx) + phi(cx + dx);
        k += detail::kronrod_wk[j] * s;
        if (j % 2 == 1) g += detail::kronrod_wg[j / 2] * s;
      }
      return Piece{a, b, k * h, ((k - g) * h).cwiseAbs().maxCoeff()};
    };
    std::vector<Piece> pieces;
    auto th = angles();
    for (std::size_t i = 0; i + 1 < th.size(); ++i) {
      double m = 0.5 * (th[i] + th[i + 1]);
      Vec2 e(std::cos(m), std::sin(m));
      auto [r0, r1] = ray_polygon(e, D);
      if (!(r1 > r0)) continue;
      pieces.push_back(gk(th[i], th[i + 1]));
    }
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(rows, cols);
    for (int it = 0;; ++it) {
      total.setZero();
      double err = 0;
      std::size_t worst = 0;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        total += pieces[i].v;
        err += pieces[i].e;
        if (pieces[i].e > pieces[worst].e) worst = i;
      }
      double mag = total.cwiseAbs().maxCoeff();
      if (err <= accuracy * mag || err <= 1e-300 || pieces.empty()) break;
      if (it > 4000)
        throw QuadratureFailure("polar route: accuracy not reached", classify(P, Q).kind, mag, err);
      Piece p = pieces[worst];
      double m = 0.5 * (p.a + p.b);
      pieces[worst] = gk(p.a, m);
      pieces.push_back(gk(m, p.b));
    }
    return total;
  }
};

// Canonical key so that (P,p) and (Q,q) are processed in a fixed order.
bool key_less(const Panel& P, const std::vector<Poly2>& ps, const Panel& Q, const std::vector<Poly2>& qs) {
  auto flat = [](const Panel& X, const std::vector<Poly2>& xs) {
    std::vector<double> k = {static_cast<double>(X.shape), static_cast<double>(X.v.size())};
    for (const auto& v : X.v) k.push_back(v(0)), k.push_back(v(1));
    k.push_back(static_cast<double>(xs.size()));
    for (const auto& p : xs)
      for (int i = 0; i < 9; ++i) k.push_back(p.c.data()[i]);
    return k;
  };
  auto kp = flat(P, ps), kq = flat(Q, qs);
  return std::lexicographical_compare(kp.begin(), kp.end(), kq.begin(), kq.end());
}

bool is_far(const PanelPairClass& cls) { return cls.kind == PairClass::Disjoint && cls.ratio >= kFarRatio; }

}  // namespace

namespace detail {

Eigen::MatrixXd far_single_layer(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                 const std::vector<Poly2>& qs, int order) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> x, y;
  Eigen::VectorXd wx, wy;
  panel_points(P, order, x, wx);
  panel_points(Q, order, y, wy);
  Eigen::MatrixXd pv(x.rows(), ps.size()), qv(y.rows(), qs.size());
  for (int k = 0; k < x.rows(); ++k)
    for (std::size_t a = 0; a < ps.size(); ++a) pv(k, a) = ps[a](x(k, 0), x(k, 1)) * wx(k);
  for (int k = 0; k < y.rows(); ++k)
    for (std::size_t b = 0; b < qs.size(); ++b) qv(k, b) = qs[b](y(k, 0), y(k, 1)) * wy(k);
  Eigen::MatrixXd K(x.rows(), y.rows());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < y.rows(); ++j) K(i, j) = 1.0 / (x.row(i) - y.row(j)).norm();
  return kInv4Pi * pv.transpose() * K * qv;
}

Eigen::MatrixXd far_slobodeckij(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                const std::vector<Poly2>& qs, int order) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> x, y;
  Eigen::VectorXd wx, wy;
  panel_points(P, order, x, wx);
  panel_points(Q, order, y, wy);
  const int m = static_cast<int>(ps.size());
  Eigen::MatrixXd pv(x.rows(), m), qv(y.rows(), m);
  for (int k = 0; k < x.rows(); ++k)
    for (int j = 0; j < m; ++j) pv(k, j) = ps[j](x(k, 0), x(k, 1));
  for (int k = 0; k < y.rows(); ++k)
    for (int j = 0; j < m; ++j) qv(k, j) = qs[j](y(k, 0), y(k, 1));
  Eigen::MatrixXd K(x.rows(), y.rows());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < y.rows(); ++j) {
      double r = (x.row(i) - y.row(j)).norm();
      K(i, j) = wx(i) * wy(j) / (r * r * r);
    }
  Eigen::VectorXd kx = K.rowwise().sum(), ky = K.colwise().sum().transpose();
  Eigen::MatrixXd cross_term = pv.transpose() * K * qv;
  return pv.transpose() * kx.asDiagonal() * pv + qv.transpose() * ky.asDiagonal() * qv - cross_term -
         cross_term.transpose();
}

Eigen::MatrixXd cartesian_single_layer(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                       const std::vector<Poly2>& qs, double accuracy) {
  SingleLayerEval ev{ps, qs};
  RectAdapter<SingleLayerEval> ad{ev};
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ps.size(), qs.size());
  CartesianEngine<RectAdapter<SingleLayerEval>, Eigen::MatrixXd> eng(ad, KernelKind::SingleLayer, accuracy, P, Q);
  eng.run(acc, 1e-12 * pair_scale(P, Q));
  return kInv4Pi * acc;
}

Eigen::MatrixXd cartesian_slobodeckij(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                      const std::vector<Poly2>& qs, double accuracy) {
  SlobodeckijEval ev{ps, qs};
  RectAdapter<SlobodeckijEval> ad{ev};
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ps.size(), ps.size());
  CartesianEngine<RectAdapter<SlobodeckijEval>, Eigen::MatrixXd> eng(ad, KernelKind::Slobodeckij, accuracy, P, Q);
  eng.run(acc, 1e-12 * pair_scale(P, Q));
  return acc;
}

Eigen::MatrixXd polar_single_layer(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                   const std::vector<Poly2>& qs, double accuracy) {
  SingleLayerEval ev{ps, qs};
  PolarEngine<SingleLayerEval> eng(ev, KernelKind::SingleLayer, P, Q, static_cast<int>(ps.size()),
                                   static_cast<int>(qs.size()));
  return kInv4Pi * eng.run(accuracy);
}

Eigen::MatrixXd polar_slobodeckij(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                  const std::vector<Poly2>& qs, double accuracy) {
  SlobodeckijEval ev{ps, qs};
  PolarEngine<SlobodeckijEval> eng(ev, KernelKind::Slobodeckij, P, Q, static_cast<int>(ps.size()),
                                   static_cast<int>(ps.size()));
  return eng.run(accuracy);
}

Eigen::Matrix4d cartesian_bilinear_grad(const Panel& P, const Panel& Q, double accuracy) {
  BilinearGradEval ev(P, Q);
  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  CartesianEngine<BilinearGradEval, Eigen::Matrix4d> eng(ev, KernelKind::SingleLayer, accuracy, P, Q);
  eng.run(acc, 1e-12 * pair_scale(P, Q));
  return kInv4Pi * acc;
}

}  // namespace detail

Eigen::MatrixXd single_layer_pair_matrix(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                         const std::vector<Poly2>& qs, double accuracy) {
  if (key_less(Q, qs, P, ps)) return single_layer_pair_matrix(Q, P, qs, ps, accuracy).transpose();
  PanelPairClass cls = classify(P, Q);
  Eigen::MatrixXd M;
  if (is_far(cls)) M = detail::far_single_layer(P, Q, ps, qs, far_field_order(cls.ratio, accuracy));
  else if (P.is_rect() && Q.is_rect()) M = detail::cartesian_single_layer(P, Q, ps, qs, accuracy);
  else M = detail::polar_single_layer(P, Q, ps, qs, accuracy);
  if (cls.kind == PairClass::Identical && ps == qs) M = 0.5 * (M + M.transpose()).eval();
  return M;
}

double single_layer_pair(const Panel& P, const Panel& Q, const Poly2& p, const Poly2& q, double accuracy) {
  if (p.is_zero() || q.is_zero()) return 0.0;
  return single_layer_pair_matrix(P, Q, {p}, {q}, accuracy)(0, 0);
}

Eigen::MatrixXd slobodeckij_pair_matrix(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                        const std::vector<Poly2>& qs, double accuracy) {
  if (key_less(Q, qs, P, ps)) return slobodeckij_pair_matrix(Q, P, qs, ps, accuracy);
  PanelPairClass cls = classify(P, Q);
  Eigen::MatrixXd M;
  if (is_far(cls)) M = detail::far_slobodeckij(P, Q, ps, qs, far_field_order(cls.ratio, accuracy));
  else if (P.is_rect() && Q.is_rect()) M = detail::cartesian_slobodeckij(P, Q, ps, qs, accuracy);
  else M = detail::polar_slobodeckij(P, Q, ps, qs, accuracy);
  return 0.5 * (M + M.transpose());
}

double slobodeckij_pair(const Panel& P, const Panel& Q, const Poly2& p, const Poly2& q, double accuracy) {
  return slobodeckij_pair_matrix(P, Q, {p}, {q}, accuracy)(0, 0);
}

Eigen::Matrix4d bilinear_grad_pair(const Panel& P, const Panel& Q, double accuracy) {
  if (!P.is_rect() || !Q.is_rect()) throw std::invalid_argument("bilinear_grad_pair: rectangles only");
  bool swap = key_less(Q, {}, P, {});
  const Panel& A = swap ? Q : P;
  const Panel& B = swap ? P : Q;
  PanelPairClass cls = classify(A, B);
  Eigen::Matrix4d M;
  if (is_far(cls)) {
    int n = far_field_order(cls.ratio, accuracy);
    std::vector<Poly2> ga, gb;
    for (const Panel* X : {&A, &B}) {
      Vec2 lo = X->lo(), hi = X->hi();
      double hx = hi(0) - lo(0), hy = hi(1) - lo(1);
      // phi = Lx_i(x1) Ly_j(x2); derivatives are linear in the other variable.
      auto& g = X == &A ? ga : gb;
      const int ix[4] = {0, 1, 1, 0}, iy[4] = {0, 0, 1, 1};
      for (int comp = 0; comp < 2; ++comp)
        for (int a = 0; a < 4; ++a) {
          double sx = ix[a] ? 1.0 / hx : -1.0 / hx, sy = iy[a] ? 1.0 / hy : -1.0 / hy;
          Poly2 lx = ix[a] ? Poly2::linear(-lo(0) / hx, 1.0 / hx, 0) : Poly2::linear(hi(0) / hx, -1.0 / hx, 0);
          Poly2 ly = iy[a] ? Poly2::linear(-lo(1) / hy, 0, 1.0 / hy) : Poly2::linear(hi(1) / hy, 0, -1.0 / hy);
          g.push_back(comp == 0 ? ly * sx : lx * sy);
        }
    }
    Eigen::MatrixXd F = detail::far_single_layer(A, B, ga, gb, n);
    M = F.block<4, 4>(0, 0) + F.block<4, 4>(4, 4);
  } else {
    M = detail::cartesian_bilinear_grad(A, B, accuracy);
  }
  if (cls.kind == PairClass::Identical) M = 0.5 * (M + M.transpose()).eval();
  return swap ? Eigen::Matrix4d(M.transpose()) : M;
}

}  // namespace mortar
