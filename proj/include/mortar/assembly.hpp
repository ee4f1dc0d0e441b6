#pragma once

#include "mortar/spaces.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>

namespace mortar {

struct AssemblyOptions {
  double accuracy = 1e-10;              // single-layer pair integrals
  double slobodeckij_accuracy = 1e-8;   // Gram matrix only
};

struct AssemblyStats {
  long pairs = 0;       // element pairs visited (unordered)
  long far = 0;         // tensor Gauss
  long near = 0;        // regularized quadrature calls
  long reused = 0;      // translation-equivalent pairs taken from the cache
  double seconds = 0;
};

// a(v,w) = <V bcurl_H v, bcurl_H w>: sum over all element pairs of
// int int grad phi(x) . grad psi(y) / (4 pi |x-y|). Exactly symmetric.
Eigen::MatrixXd assemble_A(const XSpace& X, const AssemblyOptions& opt = {}, AssemblyStats* stats = nullptr);

// B(m, j) = int_{J_m} [phi_j] ds, exact.
Eigen::MatrixXd assemble_B(const XSpace& X, const MSpace& M);

// F(j) = int f phi_j; the constant case is exact, otherwise 5-point Gauss per
// direction on each element.
Eigen::VectorXd assemble_F(const XSpace& X, double f = 1.0);
Eigen::VectorXd assemble_F(const XSpace& X, const std::function<double(const Vec2&)>& f);

// Broken L2(T) mass and H1(T) semi-norm stiffness, block diagonal.
Eigen::MatrixXd assemble_mass(const XSpace& X);
Eigen::MatrixXd assemble_stiffness(const XSpace& X);

// v^T S v = sum_i |v_i|^2_{H^{1/2}(Gamma_i)}.
Eigen::MatrixXd assemble_h12_seminorm(const XSpace& X, const AssemblyOptions& opt = {});
// Broken H^{1/2}(T) Gram: mass + semi-norm.
Eigen::MatrixXd assemble_h12_gram(const XSpace& X, const AssemblyOptions& opt = {});

struct SaddleSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd F;
  int dim_x = 0, dim_m = 0;
  double h = 0, k = 0, h_min = 0;
  AssemblyStats stats;
};

SaddleSystem assemble_system(const XSpace& X, const MSpace& M, const AssemblyOptions& opt = {}, double f = 1.0);

// "rows cols" header line, then one row per line, entries %.17g.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& A);
Eigen::MatrixXd read_matrix(std::istream& is);

}  // namespace mortar
