#pragma once

#include "mortar/geometry.hpp"
#include "mortar/polynomial.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace mortar {

inline constexpr double kInv4Pi = 0.079577471545947667884441881686257181;

enum class PairClass { Identical, EdgeAdjacent, VertexAdjacent, Disjoint };
const char* to_string(PairClass c);

struct PanelPairClass {
  PairClass kind = PairClass::Disjoint;
  double ratio = 0;  // dist(P,Q) / max(diam P, diam Q), zero unless disjoint
};

// Thrown for overlapping non-identical panels.
struct InvalidMesh : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureFailure : std::runtime_error {
  PairClass pair_class;
  double estimate;
  double error;
  QuadratureFailure(const std::string& what, PairClass c, double est, double err)
      : std::runtime_error(what), pair_class(c), estimate(est), error(err) {}
};

PanelPairClass classify(const Panel& P, const Panel& Q);

enum class KernelKind {
  SingleLayer,  // 1 / (4 pi |x-y|)
  Slobodeckij   // 1 / |x-y|^3, difference densities
};

// Pairs with separation ratio at least this are integrated by plain tensor Gauss.
inline constexpr double kFarRatio = 1.0;

// Tensor Gauss order per direction that reaches `accuracy` for a kernel
// singularity at separation ratio `ratio`.
int far_field_order(double ratio, double accuracy);

// int_P int_Q p(x) q(y) / (4 pi |x-y|).
double single_layer_pair(const Panel& P, const Panel& Q, const Poly2& p, const Poly2& q, double accuracy = 1e-10);

// M(a,b) = int_P int_Q ps[a](x) qs[b](y) / (4 pi |x-y|).
Eigen::MatrixXd single_layer_pair_matrix(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                         const std::vector<Poly2>& qs, double accuracy = 1e-10);

// int_P int_Q (p(x) - q(y))^2 / |x-y|^3, p the density on P and q on Q.
// For touching panels p and q must agree on the common boundary.
double slobodeckij_pair(const Panel& P, const Panel& Q, const Poly2& p, const Poly2& q, double accuracy = 1e-8);

// M(j,k) = int_P int_Q (ps[j](x) - qs[j](y)) (ps[k](x) - qs[k](y)) / |x-y|^3.
Eigen::MatrixXd slobodeckij_pair_matrix(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                        const std::vector<Poly2>& qs, double accuracy = 1e-8);

// Gradient pair matrix of the bilinear nodal bases on two rectangles,
// G(a,b) = int_P int_Q grad phi_a(x) . grad psi_b(y) / (4 pi |x-y|),
// local nodes in Panel vertex order. Equals the curl pair matrix.
Eigen::Matrix4d bilinear_grad_pair(const Panel& P, const Panel& Q, double accuracy = 1e-10);

namespace detail {
// Relative-coordinate routes, exposed for cross-checks.
Eigen::MatrixXd cartesian_single_layer(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                       const std::vector<Poly2>& qs, double accuracy);
Eigen::MatrixXd polar_single_layer(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                   const std::vector<Poly2>& qs, double accuracy);
Eigen::MatrixXd far_single_layer(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                 const std::vector<Poly2>& qs, int order);
Eigen::MatrixXd cartesian_slobodeckij(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                      const std::vector<Poly2>& qs, double accuracy);
Eigen::MatrixXd polar_slobodeckij(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                  const std::vector<Poly2>& qs, double accuracy);
Eigen::MatrixXd far_slobodeckij(const Panel& P, const Panel& Q, const std::vector<Poly2>& ps,
                                const std::vector<Poly2>& qs, int order);
Eigen::Matrix4d cartesian_bilinear_grad(const Panel& P, const Panel& Q, double accuracy);

// Gauss points of order n on a panel, weights include the Jacobian.
void panel_points(const Panel& P, int n, Eigen::Matrix<double, Eigen::Dynamic, 2>& x, Eigen::VectorXd& w);
}  // namespace detail

}  // namespace mortar
