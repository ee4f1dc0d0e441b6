#include "mortar/shape.hpp"

#include "mortar/kernel.hpp"

namespace mortar {

namespace {

// (al + be x1)(ga + de x2)
Poly2 product(double al, double be, double ga, double de) {
  Poly2 p;
  p.c(0, 0) = al * ga;
  p.c(1, 0) = be * ga;
  p.c(0, 1) = al * de;
  p.c(1, 1) = be * de;
  return p;
}

}  // namespace

std::vector<Poly2> shape_functions(const Panel& P) {
  if (P.is_rect()) {
    Vec2 lo = P.lo(), hi = P.hi();
    double hx = hi(0) - lo(0), hy = hi(1) - lo(1);
    const int ix[4] = {0, 1, 1, 0}, iy[4] = {0, 0, 1, 1};
    std::vector<Poly2> f;
    for (int a = 0; a < 4; ++a) {
      double al = ix[a] ? -lo(0) / hx : hi(0) / hx, be = ix[a] ? 1.0 / hx : -1.0 / hx;
      double ga = iy[a] ? -lo(1) / hy : hi(1) / hy, de = iy[a] ? 1.0 / hy : -1.0 / hy;
      f.push_back(product(al, be, ga, de));
    }
    return f;
  }
  const double A2 = 2.0 * P.area();
  std::vector<Poly2> f;
  for (int a = 0; a < 3; ++a) {
    const Vec2& b = P.v[(a + 1) % 3];
    const Vec2& c = P.v[(a + 2) % 3];
    f.push_back(Poly2::linear((b(0) * c(1) - c(0) * b(1)) / A2, (b(1) - c(1)) / A2, (c(0) - b(0)) / A2));
  }
  return f;
}

std::vector<Poly2> shape_gradients(const Panel& P) {
  auto f = shape_functions(P);
  const int nv = static_cast<int>(f.size());
  std::vector<Poly2> g(2 * nv);
  for (int a = 0; a < nv; ++a) {
    const auto& c = f[a].c;
    g[a].c(0, 0) = c(1, 0);
    g[a].c(0, 1) = c(1, 1);
    g[nv + a].c(0, 0) = c(0, 1);
    g[nv + a].c(1, 0) = c(1, 1);
  }
  return g;
}

Eigen::MatrixXd element_mass(const Panel& P) {
  auto f = shape_functions(P);
  const int nv = static_cast<int>(f.size());
  Eigen::Matrix<double, Eigen::Dynamic, 2> x;
  Eigen::VectorXd w;
  detail::panel_points(P, 3, x, w);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nv, nv);
  for (int k = 0; k < x.rows(); ++k) {
    Eigen::VectorXd v(nv);
    for (int a = 0; a < nv; ++a) v(a) = f[a](x(k, 0), x(k, 1));
    M += w(k) * v * v.transpose();
  }
  return M;
}

Eigen::MatrixXd element_stiffness(const Panel& P) {
  auto g = shape_gradients(P);
  const int nv = static_cast<int>(g.size()) / 2;
  Eigen::Matrix<double, Eigen::Dynamic, 2> x;
  Eigen::VectorXd w;
  detail::panel_points(P, 3, x, w);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nv, nv);
  for (int k = 0; k < x.rows(); ++k) {
    Eigen::VectorXd gx(nv), gy(nv);
    for (int a = 0; a < nv; ++a) gx(a) = g[a](x(k, 0), x(k, 1)), gy(a) = g[nv + a](x(k, 0), x(k, 1));
    K += w(k) * (gx * gx.transpose() + gy * gy.transpose());
  }
  return K;
}

}  // namespace mortar
