#include "mortar/quadrature.hpp"

#include <array>
#include <mutex>
#include <stdexcept>

namespace mortar {

namespace detail {
// Abscissae and weights from QUADPACK qk15.
const double kronrod_x[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                             0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                             0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                             0.207784955007898467600689403773245, 0.0};
const double kronrod_wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                              0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                              0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                              0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kronrod_wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace detail

namespace {
constexpr int kMaxGauss = 64;
std::once_flag gauss_once;
std::array<GaussRule<double>, kMaxGauss + 1> gauss_table;
std::once_flag tri_once;
std::array<TriangleRule, kMaxGauss + 1> tri_table;
}  // namespace

const GaussRule<double>& gauss(int n) {
  if (n < 1 || n > kMaxGauss) throw std::out_of_range("gauss: order out of range");
  std::call_once(gauss_once, [] {
    for (int k = 1; k <= kMaxGauss; ++k) gauss_table[k] = gauss_legendre<double>(k);
  });
  return gauss_table[n];
}

const TriangleRule& triangle_rule(int n) {
  if (n < 1 || n > kMaxGauss) throw std::out_of_range("triangle_rule: order out of range");
  std::call_once(tri_once, [] {
    for (int k = 1; k <= kMaxGauss; ++k) {
      const auto& g = gauss(k);
      TriangleRule& r = tri_table[k];
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          // (u,v) in the unit square, s = u(1-v), t = uv, Jacobian u.
          double u = g.x(i), v = g.x(j);
          r.x.emplace_back(u * (1 - v), u * v);
          r.w.push_back(g.w(i) * g.w(j) * u);
        }
    }
  });
  return tri_table[n];
}

}  // namespace mortar
