#include "mortar/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace mortar {

const char* to_string(SolvePath p) { return p == SolvePath::Symmetric ? "symmetric" : "lu"; }

namespace {

double inf_norm(const Eigen::MatrixXd& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().rowwise().sum().maxCoeff();
}

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void residuals(const SaddleSystem& S, MortarSolution& x) {
  Eigen::VectorXd r = S.A * x.u - S.F;
  if (S.dim_m > 0) r += S.B.transpose() * x.lambda;
  double den = inf_norm(S.A) * max_abs(x.u) + max_abs(S.F);
  x.residual_a = den > 0 ? max_abs(r) / den : max_abs(r);
  if (S.dim_m == 0) {
    x.residual_b = 0;
    return;
  }
  double denb = inf_norm(S.B) * max_abs(x.u);
  double rb = max_abs(S.B * x.u);
  x.residual_b = denb > 0 ? rb / denb : rb;
}

}  // namespace

void check_full_row_rank(const Eigen::MatrixXd& B, double tol) {
  if (B.rows() == 0) return;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B.transpose());
  qr.setThreshold(tol);
  const int rank = static_cast<int>(qr.rank());
  if (rank == B.rows()) return;
  std::vector<int> rows;
  for (Eigen::Index k = rank; k < B.rows(); ++k) rows.push_back(qr.colsPermutation().indices()(k));
  std::sort(rows.begin(), rows.end());
  std::string list;
  for (int r : rows) list += (list.empty() ? "" : ",") + std::to_string(r);
  throw RankDeficiency("B is rank deficient (rank " + std::to_string(rank) + " of " + std::to_string(B.rows()) +
                           "); dependent multiplier rows: " + list,
                       rows);
}

MortarSolution solve_saddle(const SaddleSystem& S, SolvePath path) {
  const int n = static_cast<int>(S.A.rows()), m = static_cast<int>(S.B.rows());
  if (S.A.cols() != n || S.F.size() != n || (m > 0 && S.B.cols() != n))
    throw SolverError("solve_saddle: inconsistent block sizes");
  check_full_row_rank(S.B);
  MortarSolution x;
  x.path = path;
  if (path == SolvePath::Symmetric) {
    Eigen::LLT<Eigen::MatrixXd> llt(S.A);
    if (llt.info() == Eigen::Success) {
      if (m == 0) {
        x.u = llt.solve(S.F);
        x.lambda = Eigen::VectorXd::Zero(0);
      } else {
        Eigen::MatrixXd AiBt = llt.solve(S.B.transpose());
        Eigen::MatrixXd Schur = S.B * AiBt;
        Schur = 0.5 * (Schur + Schur.transpose()).eval();
        Eigen::LLT<Eigen::MatrixXd> sl(Schur);
        if (sl.info() != Eigen::Success) throw SolverError("solve_saddle: Schur complement is not positive definite");
        Eigen::VectorXd AiF = llt.solve(S.F);
        x.lambda = sl.solve(S.B * AiF);
        x.u = AiF - AiBt * x.lambda;
      }
      residuals(S, x);
      return x;
    }
    x.fell_back = true;
    x.path = SolvePath::LU;
  }
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = S.A;
  if (m > 0) {
    K.topRightCorner(n, m) = S.B.transpose();
    K.bottomLeftCorner(m, n) = S.B;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
  rhs.head(n) = S.F;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) throw SolverError("solve_saddle: LU factorization failed");
  x.u = sol.head(n);
  x.lambda = sol.tail(m);
  residuals(S, x);
  return x;
}

ConformingSolution solve_conforming(const XSpace& X, const AssemblyOptions& opt, double f) {
  if (X.decomposition().size() != 1 || !X.decomposition().interfaces.empty())
    throw SolverError("solve_conforming: needs a single sub-domain covering the screen");
  ConformingSolution c;
  Eigen::MatrixXd A = assemble_A(X, opt, &c.stats);
  Eigen::VectorXd F = assemble_F(X, f);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw SolverError("solve_conforming: Galerkin matrix is not positive definite");
  c.u = llt.solve(F);
  c.energy = F.dot(c.u);
  c.h = X.mesh(0).h;
  c.dim = X.dim();
  return c;
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& B) {
  const Eigen::Index n = B.cols(), m = B.rows();
  if (m == 0) return Eigen::MatrixXd::Identity(n, n);
  check_full_row_rank(B);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B.transpose());
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - m);
}

Eigen::VectorXd solve_reduced(const SaddleSystem& S) {
  Eigen::MatrixXd Z = kernel_basis(S.B);
  Eigen::MatrixXd Az = Z.transpose() * S.A * Z;
  Az = 0.5 * (Az + Az.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(Az);
  if (llt.info() != Eigen::Success) throw SolverError("solve_reduced: reduced matrix is not positive definite");
  return Z * llt.solve(Z.transpose() * S.F);
}

void write_solution_csv(std::ostream& os, const XSpace& X, const Eigen::VectorXd& u) {
  os << "dof,subdomain,x,y,u\n";
  char buf[160];
  for (int k = 0; k < X.dim(); ++k) {
    const Dof& d = X.dofs()[k];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", k, d.subdomain + 1, d.x(0), d.x(1), u(k));
    os << buf;
  }
}

void write_multiplier_csv(std::ostream& os, const MSpace& M, const Eigen::VectorXd& lambda) {
  os << "mdof,edge,a,b,lambda\n";
  char buf[160];
  for (int k = 0; k < M.dim(); ++k) {
    const MDof& d = M.dofs[k];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", k, d.edge + 1, d.a, d.b, lambda(k));
    os << buf;
  }
}

}  // namespace mortar
