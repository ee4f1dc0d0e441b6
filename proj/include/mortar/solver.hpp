#pragma once

#include "mortar/assembly.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mortar {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Multiplier rows of B that are linearly dependent on the others.
struct RankDeficiency : SolverError {
  std::vector<int> rows;
  RankDeficiency(const std::string& what, std::vector<int> r) : SolverError(what), rows(std::move(r)) {}
};

enum class SolvePath {
  Symmetric,  // Cholesky of A and of the Schur complement B A^{-1} B^T
  LU          // partial-pivot LU of the full block matrix
};
const char* to_string(SolvePath p);

struct MortarSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd lambda;
  // ||A u + B^T l - F|| / (||A|| ||u|| + ||F||) and ||B u|| / (||B|| ||u||), max norms.
  double residual_a = 0;
  double residual_b = 0;
  SolvePath path = SolvePath::Symmetric;
  bool fell_back = false;  // A not SPD, LU used instead
};

// Throws RankDeficiency if B lacks full row rank.
void check_full_row_rank(const Eigen::MatrixXd& B, double tol = 1e-10);

MortarSolution solve_saddle(const SaddleSystem& S, SolvePath path = SolvePath::Symmetric);

struct ConformingSolution {
  Eigen::VectorXd u;
  double energy = 0;  // F(u)
  double h = 0;
  int dim = 0;
  AssemblyStats stats;
};

// Galerkin solution on a single sub-domain covering the whole screen.
ConformingSolution solve_conforming(const XSpace& X, const AssemblyOptions& opt = {}, double f = 1.0);

// Orthonormal basis of null(B) (identity when B has no rows).
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& B);

// a(u,v) = F(v) for all v in V_h, through the kernel basis.
Eigen::VectorXd solve_reduced(const SaddleSystem& S);

// "dof,subdomain,x,y,u" then "mdof,edge,a,b,lambda".
void write_solution_csv(std::ostream& os, const XSpace& X, const Eigen::VectorXd& u);
void write_multiplier_csv(std::ostream& os, const MSpace& M, const Eigen::VectorXd& lambda);

}  // namespace mortar
