#include "doctest.h"

#include "mortar/analysis.hpp"
#include "mortar/experiment.hpp"
#include "mortar/solver.hpp"

#include <cmath>
#include <sstream>
#include <thread>

using namespace mortar;

namespace {

StepDiscretization preset(Preset p, int step) {
  return discretize(build_decomposition(p), default_schedule(p), step, Grouping::Pairs);
}

XSpace unit_square(int n) {
  Decomposition d = parse_decomposition("subdomain 0 0 1 0 1 1 0 1\n");
  return build_x_space(d, {build_subdomain_mesh(d, 0, n)});
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

double g_norm(const Eigen::MatrixXd& G, const Eigen::VectorXd& v) { return std::sqrt(v.dot(G * v)); }

}  // namespace

TEST_CASE("zero load gives the zero solution") {
  auto D = preset(Preset::Exp3, 1);
  SaddleSystem S = assemble_system(D.X, D.M);
  S.F.setZero();
  for (SolvePath p : {SolvePath::Symmetric, SolvePath::LU}) {
    MortarSolution x = solve_saddle(S, p);
    CHECK(x.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(x.lambda.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("exp1 step 1: matched meshes give round-off jumps and B u = 0") {
  auto D = preset(Preset::Exp1, 1);
  SaddleSystem S = assemble_system(D.X, D.M);
  MortarSolution x = solve_saddle(S);
  CHECK_FALSE(x.fell_back);
  CHECK(x.residual_a <= 1e-10);
  CHECK(x.residual_b <= 1e-10);
  double Bn = S.B.cwiseAbs().rowwise().sum().maxCoeff();
  CHECK(max_abs(S.B * x.u) <= 1e-10 * Bn * max_abs(x.u));
  CHECK(jump_l2_norm(D.X, x.u) <= 1e-12 * max_abs(x.u));
}

TEST_CASE("residuals and zero-mean jumps on every preset, step 1 and 2") {
  for (Preset p : {Preset::Exp1, Preset::Exp2, Preset::Exp3, Preset::Exp4})
    for (int step : {1, 2}) {
      auto D = preset(p, step);
      SaddleSystem S = assemble_system(D.X, D.M);
      MortarSolution x = solve_saddle(S);
      INFO(to_string(p), " step ", step);
      CHECK(x.residual_a <= 1e-10);
      CHECK(x.residual_b <= 1e-10);
      double umax = max_abs(x.u);
      for (const MDof& m : D.M.dofs) {
        double mean = jump(D.X, x.u, m.edge).integral(m.a, m.b);
        CHECK(std::abs(mean) <= 1e-10 * (m.b - m.a) * umax);
      }
    }
}

TEST_CASE("symmetric and LU paths agree") {
  for (Preset p : {Preset::Exp1, Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
    auto D = preset(p, 2);
    SaddleSystem S = assemble_system(D.X, D.M);
    MortarSolution a = solve_saddle(S, SolvePath::Symmetric), b = solve_saddle(S, SolvePath::LU);
    CHECK(a.path == SolvePath::Symmetric);
    CHECK(b.path == SolvePath::LU);
    CHECK(max_abs(a.u - b.u) <= 1e-10 * max_abs(a.u));
    // exp1 has lambda = 0 up to round-off; F / B is its natural scale
    double Bn = S.B.cwiseAbs().rowwise().sum().maxCoeff();
    double lscale = std::max(max_abs(a.lambda), max_abs(S.F) / Bn);
    CHECK(max_abs(a.lambda - b.lambda) <= 1e-10 * lscale);
  }
}

TEST_CASE("indefinite A falls back to LU") {
  auto D = preset(Preset::Exp2, 1);
  SaddleSystem S = assemble_system(D.X, D.M);
  S.A = -S.A;
  MortarSolution x = solve_saddle(S);
  CHECK(x.fell_back);
  CHECK(x.path == SolvePath::LU);
  CHECK(x.residual_a <= 1e-10);
  CHECK(x.residual_b <= 1e-10);
}

TEST_CASE("saddle errors") {
  auto D = preset(Preset::Exp2, 1);
  SaddleSystem S = assemble_system(D.X, D.M);
  SUBCASE("inconsistent sizes") {
    S.F = Eigen::VectorXd::Ones(S.F.size() + 1);
    CHECK_THROWS_AS(solve_saddle(S), SolverError);
  }
  SUBCASE("duplicated multiplier row is reported") {
    Eigen::MatrixXd B(S.B.rows() + 1, S.B.cols());
    B << S.B, S.B.row(0);
    S.B = B;
    const int last = static_cast<int>(B.rows()) - 1;
    try {
      solve_saddle(S);
      FAIL("no rank deficiency reported");
    } catch (const RankDeficiency& e) {
      REQUIRE(e.rows.size() == 1);
      CHECK((e.rows[0] == 0 || e.rows[0] == last));
      CHECK(std::string(e.what()).find("dependent multiplier rows") != std::string::npos);
    }
    CHECK_THROWS_AS(kernel_basis(B), RankDeficiency);
  }
  SUBCASE("zero row") {
    S.B.row(1).setZero();
    try {
      check_full_row_rank(S.B);
      FAIL("no rank deficiency reported");
    } catch (const RankDeficiency& e) {
      REQUIRE(e.rows.size() == 1);
      CHECK(e.rows[0] == 1);
    }
  }
}

TEST_CASE("conforming solve") {
  SUBCASE("f = 0") {
    ConformingSolution c = solve_conforming(unit_square(4), {}, 0.0);
    CHECK(c.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.energy == 0.0);
  }
  SUBCASE("energy increases with n and the Galerkin identity holds") {
    double prev = 0;
    for (int n = 2; n <= 12; ++n) {
      XSpace X = unit_square(n);
      ConformingSolution c = solve_conforming(X);
      CHECK(c.dim == (n - 1) * (n - 1));
      CHECK(c.h == doctest::Approx(1.0 / n));
      CHECK(c.energy > prev);
      prev = c.energy;
      Eigen::MatrixXd A = assemble_A(X);
      CHECK(std::abs(c.u.dot(A * c.u) - c.energy) <= 1e-10 * c.energy);
    }
  }
  SUBCASE("rejects several sub-domains") {
    CHECK_THROWS_AS(solve_conforming(preset(Preset::Exp1, 1).X), SolverError);
  }
}

TEST_CASE("kernel basis") {
  SUBCASE("exp4 step 1 has dimension 27 - 4") {
    auto D = preset(Preset::Exp4, 1);
    Eigen::MatrixXd B = assemble_B(D.X, D.M);
    REQUIRE(B.rows() == 4);
    REQUIRE(B.cols() == 27);
    Eigen::MatrixXd Z = kernel_basis(B);
    CHECK(Z.cols() == 23);
    CHECK((B * Z).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((Z.transpose() * Z - Eigen::MatrixXd::Identity(23, 23)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("no interfaces gives the identity") {
    Eigen::MatrixXd B(0, 9);
    Eigen::MatrixXd Z = kernel_basis(B);
    CHECK(Z.isApprox(Eigen::MatrixXd::Identity(9, 9)));
  }
  SUBCASE("every preset") {
    for (Preset p : {Preset::Exp1, Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
      auto D = preset(p, 2);
      Eigen::MatrixXd B = assemble_B(D.X, D.M);
      Eigen::MatrixXd Z = kernel_basis(B);
      CHECK(Z.cols() == D.X.dim() - D.M.dim());
      CHECK((B * Z).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((Z.transpose() * Z - Eigen::MatrixXd::Identity(Z.cols(), Z.cols())).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("saddle solution equals the reduced solution in the broken Gram norm") {
  for (Preset p : {Preset::Exp1, Preset::Exp4}) {
    auto D = preset(p, 1);
    SaddleSystem S = assemble_system(D.X, D.M);
    Eigen::MatrixXd G = assemble_h12_gram(D.X);
    Eigen::VectorXd u = solve_saddle(S).u, r = solve_reduced(S);
    CHECK(g_norm(G, u - r) <= 1e-8 * g_norm(G, u));
  }
}

TEST_CASE("concurrent solves on independent systems") {
  auto D1 = preset(Preset::Exp3, 2), D2 = preset(Preset::Exp4, 2);
  SaddleSystem S1 = assemble_system(D1.X, D1.M), S2 = assemble_system(D2.X, D2.M);
  MortarSolution r1 = solve_saddle(S1), r2 = solve_saddle(S2);
  MortarSolution c1, c2;
  std::thread t1([&] { c1 = solve_saddle(S1); });
  std::thread t2([&] { c2 = solve_saddle(S2); });
  t1.join();
  t2.join();
  CHECK(c1.u == r1.u);
  CHECK(c2.u == r2.u);
  CHECK(c2.lambda == r2.lambda);
}

TEST_CASE("solution CSV") {
  auto D = preset(Preset::Exp2, 1);
  MortarSolution x = solve_saddle(assemble_system(D.X, D.M));
  std::ostringstream us, ls;
  write_solution_csv(us, D.X, x.u);
  write_multiplier_csv(ls, D.M, x.lambda);
  std::istringstream ui(us.str()), li(ls.str());
  std::string line;
  std::getline(ui, line);
  CHECK(line == "dof,subdomain,x,y,u");
  int rows = 0;
  while (std::getline(ui, line)) {
    if (rows == 0) {
      const Dof& d = D.X.dofs()[0];
      std::istringstream f(line);
      std::string cell;
      std::vector<double> v;
      while (std::getline(f, cell, ',')) v.push_back(std::stod(cell));
      REQUIRE(v.size() == 5);
      CHECK(v[0] == 0);
      CHECK(v[1] == d.subdomain + 1);
      CHECK(v[2] == d.x(0));
      CHECK(v[3] == d.x(1));
      CHECK(v[4] == x.u(0));
    }
    ++rows;
  }
  CHECK(rows == D.X.dim());
  std::getline(li, line);
  CHECK(line == "mdof,edge,a,b,lambda");
  rows = 0;
  while (std::getline(li, line)) ++rows;
  CHECK(rows == D.M.dim());
}
