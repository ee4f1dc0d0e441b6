#include "doctest.h"

#include "mortar/assembly.hpp"
#include "mortar/experiment.hpp"
#include "mortar/quadrature.hpp"
#include "mortar/spaces.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace mortar;

namespace {

XSpace two_squares(int n0, int n1) {
  Decomposition d = parse_decomposition("subdomain 0 0 1 0 1 1 0 1\nsubdomain 1 0 2 0 2 1 1 1\n");
  return build_x_space(d, {build_subdomain_mesh(d, 0, n0), build_subdomain_mesh(d, 1, n1)});
}

XSpace preset_space(Preset p, int step) {
  return discretize(build_decomposition(p), default_schedule(p), step, Grouping::Pairs).X;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

// Coordinates along an edge where either side's mesh has a node, found by
// scanning the meshes directly.
std::vector<double> edge_node_coordinates(const XSpace& X, int edge) {
  const InterfaceEdge& e = X.decomposition().interfaces[edge];
  std::vector<double> s = {0.0, e.length()};
  for (int side : {e.lag, e.mor})
    for (const auto& x : X.mesh(side).nodes)
      if (e.contains(x, 1e-12)) s.push_back(e.coordinate(x));
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(), [](double a, double b) { return std::abs(a - b) < 1e-13; }), s.end());
  return s;
}

// Pointwise jump through per-element evaluation on both sides.
double jump_at(const XSpace& X, const Eigen::VectorXd& x, int edge, double s) {
  const InterfaceEdge& e = X.decomposition().interfaces[edge];
  Vec2 p = e.point(s);
  return evaluate(X, x, e.lag, p) - evaluate(X, x, e.mor, p);
}

// int_edge f over 1000 uniform pieces, each split at mesh nodes and
// integrated by 3-point Gauss (exact for squares of linear pieces).
template <typename F>
double composite(const XSpace& X, int edge, F&& f) {
  const double L = X.decomposition().interfaces[edge].length();
  std::vector<double> cuts = edge_node_coordinates(X, edge);
  for (int i = 0; i <= 1000; ++i) cuts.push_back(L * i / 1000);
  std::sort(cuts.begin(), cuts.end());
  const auto& g = gauss(3);
  double sum = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    if (b - a < 1e-15) continue;
    for (int q = 0; q < 3; ++q) sum += (b - a) * g.w(q) * f(a + (b - a) * g.x(q));
  }
  return sum;
}

}  // namespace

TEST_CASE("X-space dimensions") {
  SUBCASE("exp1 step 1: 4 DOFs per quadrant") {
    XSpace X = preset_space(Preset::Exp1, 1);
    CHECK(X.dim() == 16);
    for (int i = 0; i < 4; ++i) CHECK(X.count(i) == 4);
  }
  SUBCASE("single square n x n: (n-1)^2") {
    Decomposition d = parse_decomposition("subdomain 0 0 1 0 1 1 0 1\n");
    for (int n = 1; n <= 8; ++n) CHECK(build_x_space(d, {build_subdomain_mesh(d, 0, n)}).dim() == (n - 1) * (n - 1));
  }
  SUBCASE("exp4 step 1") { CHECK(preset_space(Preset::Exp4, 1).dim() == 27); }
}

TEST_CASE("no DOF sits on the outer boundary; interface nodes carry one DOF per side") {
  XSpace X = preset_space(Preset::Exp3, 2);
  const Decomposition& d = X.decomposition();
  for (const auto& dof : X.dofs()) CHECK_FALSE(d.on_outer_boundary(dof.x, 1e-12));
  int shared = 0;
  for (std::size_t i = 0; i < X.dofs().size(); ++i)
    for (std::size_t j = i + 1; j < X.dofs().size(); ++j)
      if ((X.dofs()[i].x - X.dofs()[j].x).norm() < 1e-14) {
        CHECK(X.dofs()[i].subdomain != X.dofs()[j].subdomain);
        ++shared;
      }
  CHECK(shared > 0);
}

TEST_CASE("DOF order is sub-domain-major then lexicographic, and deterministic") {
  XSpace X = preset_space(Preset::Exp2, 2), Y = preset_space(Preset::Exp2, 2);
  REQUIRE(X.dim() == Y.dim());
  for (int i = 0; i + 1 < X.dim(); ++i) {
    const Dof &a = X.dofs()[i], &b = X.dofs()[i + 1];
    CHECK(a.subdomain <= b.subdomain);
    if (a.subdomain == b.subdomain) CHECK((a.x(0) < b.x(0) || (a.x(0) == b.x(0) && a.x(1) < b.x(1))));
    CHECK(X.dofs()[i].x == Y.dofs()[i].x);
    CHECK(X.dofs()[i].node == Y.dofs()[i].node);
  }
  std::ostringstream a, b;
  write_dof_csv(a, X);
  write_dof_csv(b, Y);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("dof,subdomain,x,y\n", 0) == 0);
}

TEST_CASE("M-space dimensions") {
  auto dim_m = [](int step) {
    return discretize(build_decomposition(Preset::Exp4), default_schedule(Preset::Exp4), step, Grouping::Pairs)
        .M.dim();
  };
  CHECK(dim_m(1) == 4);
  CHECK(dim_m(3) == 11);
  XSpace X = two_squares(2, 2);
  MSpace M = build_m_space(X, Grouping::Whole);
  CHECK(M.dim() == 1);
  CHECK(M.lengths()(0) == doctest::Approx(1.0));
  // DOF count is the sum of multiplier elements over edges, edge-major
  StepDiscretization D = discretize(build_decomposition(Preset::Exp3), default_schedule(Preset::Exp3), 3,
                                    Grouping::Pairs);
  int total = 0;
  for (const auto& p : D.M.partitions) total += p.elements();
  CHECK(D.M.dim() == total);
  for (int m = 0; m + 1 < D.M.dim(); ++m) CHECK(D.M.dofs[m].edge <= D.M.dofs[m + 1].edge);
}

TEST_CASE("identity grouping is rejected when building M") {
  XSpace X = two_squares(4, 4);
  CHECK_THROWS_AS(build_m_space(X, Grouping::Identity), MeshError);
}

TEST_CASE("traces") {
  XSpace X = preset_space(Preset::Exp2, 2);
  const int L = static_cast<int>(X.decomposition().interfaces.size());
  SUBCASE("zero vector") {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(X.dim());
    for (int e = 0; e < L; ++e)
      for (Side s : {Side::Lag, Side::Mor})
        for (double v : trace_on_edge(X, z, s, e).v) CHECK(v == 0.0);
  }
  SUBCASE("interpolant of x1 reproduces x1 at the breakpoints") {
    // Boundary DOFs do not exist, so the trace is zero at outer-boundary points.
    auto g = [](const Vec2& p) { return p(0); };
    Eigen::VectorXd x = interpolate(X, g);
    for (int e = 0; e < L; ++e) {
      const InterfaceEdge& ed = X.decomposition().interfaces[e];
      EdgeTrace t = trace_on_edge(X, x, Side::Lag, e);
      for (std::size_t k = 0; k < t.s.size(); ++k) {
        Vec2 p = ed.point(t.s[k]);
        double expect = X.decomposition().on_outer_boundary(p, 1e-12) ? 0.0 : p(0);
        CHECK(std::abs(t.v[k] - expect) < 1e-14);
      }
    }
  }
  SUBCASE("random vector: trace equals per-element evaluation at 100 points") {
    Eigen::VectorXd x = random_vector(X.dim(), 7);
    for (int e = 0; e < L; ++e) {
      const InterfaceEdge& ed = X.decomposition().interfaces[e];
      for (Side s : {Side::Lag, Side::Mor}) {
        EdgeTrace t = trace_on_edge(X, x, s, e);
        int sub = s == Side::Lag ? ed.lag : ed.mor;
        double err = 0;
        for (int k = 0; k < 100; ++k) {
          double q = ed.length() * (k + 0.5) / 100;
          err = std::max(err, std::abs(t(q) - evaluate(X, x, sub, ed.point(q))));
        }
        CHECK(err < 1e-12);
      }
    }
  }
}

TEST_CASE("jumps") {
  SUBCASE("globally continuous function on exp1 matched meshes") {
    XSpace X = preset_space(Preset::Exp1, 3);
    Eigen::VectorXd x = interpolate(X, [](const Vec2& p) { return std::sin(3 * p(0)) * p(1) * (1 - p(1)); });
    for (int e = 0; e < 4; ++e)
      for (double v : jump(X, x, e).v) CHECK(std::abs(v) < 1e-15);
  }
  SUBCASE("lag hat against zero mor trace") {
    XSpace X = two_squares(2, 3);
    const InterfaceEdge& ed = X.decomposition().interfaces[0];
    REQUIRE(ed.lag == 0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(X.dim());
    // the single interior lag node on x = 1 is (1, 0.5)
    int hit = -1;
    for (int i = 0; i < X.dim(); ++i)
      if (X.dofs()[i].subdomain == 0 && (X.dofs()[i].x - Vec2(1, 0.5)).norm() < 1e-14) hit = i;
    REQUIRE(hit >= 0);
    x(hit) = 1;
    PiecewiseLinear j = jump(X, x, 0);
    for (int k = 0; k <= 50; ++k) {
      double t = k / 50.0;
      CHECK(std::abs(j(t) - (1 - std::abs(2 * t - 1))) < 1e-14);
    }
    CHECK(std::abs(j.squared_integral() - 1.0 / 3) < 1e-14);
  }
  SUBCASE("random vector: int jump^2 against dense sampling") {
    for (Preset p : {Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
      XSpace X = preset_space(p, 2);
      Eigen::VectorXd x = random_vector(X.dim(), 11);
      for (int e = 0; e < static_cast<int>(X.decomposition().interfaces.size()); ++e) {
        double exact = jump(X, x, e).squared_integral();
        double dense = composite(X, e, [&](double s) {
          double j = jump_at(X, x, e, s);
          return j * j;
        });
        CHECK(std::abs(exact - dense) <= 1e-10 * std::abs(dense));
      }
    }
  }
  SUBCASE("merged breakpoints contain both sides") {
    XSpace X = preset_space(Preset::Exp2, 1);
    for (int e = 0; e < 4; ++e) {
      auto m = merged_breakpoints(X, e);
      auto oracle = edge_node_coordinates(X, e);
      REQUIRE(m.size() == oracle.size());
      for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(m[i] - oracle[i]) < 1e-14);
    }
  }
}

TEST_CASE("hanging cross-point on exp4: mor trace interpolates the coarse side") {
  // Gamma_3 has odd row counts at odd steps, so (0,0) lies inside one of its element edges.
  XSpace X = preset_space(Preset::Exp4, 1);
  Eigen::VectorXd x = random_vector(X.dim(), 3);
  for (int e = 0; e < 3; ++e) {
    const InterfaceEdge& ed = X.decomposition().interfaces[e];
    for (Side s : {Side::Lag, Side::Mor}) {
      EdgeTrace t = trace_on_edge(X, x, s, e);
      int sub = s == Side::Lag ? ed.lag : ed.mor;
      for (int k = 0; k <= 40; ++k) {
        double q = ed.length() * k / 40;
        CHECK(std::abs(t(q) - evaluate(X, x, sub, ed.point(q))) < 1e-12);
      }
    }
  }
}

TEST_CASE("extension E_l") {
  XSpace X = two_squares(4, 3);
  const TracePartition& lagt = X.lag_trace(0);
  EdgeTrace v;
  v.edge = 0;
  v.s = lagt.breakpoints;
  v.v.assign(v.s.size(), 0.0);
  SUBCASE("zero") { CHECK(extension_El(X, v).isZero(0)); }
  SUBCASE("discrete hat -> one basis vector") {
    v.v[2] = 1;
    Eigen::VectorXd x = extension_El(X, v);
    CHECK(x.sum() == 1.0);
    CHECK(x.cwiseAbs().sum() == 1.0);
    int k;
    x.maxCoeff(&k);
    CHECK(X.dofs()[k].subdomain == X.decomposition().interfaces[0].lag);
    CHECK((X.dofs()[k].x - X.decomposition().interfaces[0].point(v.s[2])).norm() < 1e-14);
  }
  SUBCASE("nonzero at a constrained endpoint is rejected") {
    v.v[0] = 1;
    CHECK_THROWS(extension_El(X, v));
  }
  SUBCASE("E_l followed by the lag trace is the identity on edge nodes") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t k = 1; k + 1 < v.v.size(); ++k) v.v[k] = u(rng);
    EdgeTrace t = trace_on_edge(X, extension_El(X, v), Side::Lag, 0);
    REQUIRE(t.s.size() == v.s.size());
    for (std::size_t k = 0; k < v.v.size(); ++k) CHECK(std::abs(t.v[k] - v.v[k]) < 1e-15);
  }
}

TEST_CASE("E_l L2 bound scales like h") {
  // ||E v||^2_{L2(Gamma_lag)} / (h ||v||^2_{L2(gamma)}) stays bounded under refinement.
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  double lo = 1e300, hi = 0;
  for (int n = 2; n <= 16; n *= 2) {
    XSpace X = two_squares(n, n + 1);
    Eigen::MatrixXd Mass = assemble_mass(X);
    const TracePartition& lagt = X.lag_trace(0);
    for (int trial = 0; trial < 20; ++trial) {
      EdgeTrace v;
      v.edge = 0;
      v.s = lagt.breakpoints;
      v.v.assign(v.s.size(), 0.0);
      for (std::size_t k = 1; k + 1 < v.v.size(); ++k) v.v[k] = u(rng);
      Eigen::VectorXd x = extension_El(X, v);
      double ratio = x.dot(Mass * x) / (X.mesh(X.decomposition().interfaces[0].lag).h * v.squared_integral());
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  CHECK(hi < 1.0);
  CHECK(lo > 0.05);
}

TEST_CASE("projection pi_l") {
  XSpace X = two_squares(2, 3);
  MSpace M = build_m_space(X, Grouping::Whole);
  REQUIRE(M.dim() == 1);
  const double J = M.dofs[0].b - M.dofs[0].a;
  SUBCASE("v = 1 on a single J gives 2 phi, mean preserved") {
    EdgeTrace p = projection_pil(X, M, 0, [](double) { return 1.0; });
    EdgeTrace phi = hat_phi(X, M, 0);
    for (std::size_t k = 0; k < p.v.size(); ++k) CHECK(std::abs(p.v[k] - 2 * phi.v[k]) < 1e-14);
    CHECK(std::abs(p.integral() - J) < 1e-14);
    CHECK(std::abs(phi.integral() - J / 2) < 1e-15);
  }
  SUBCASE("v = phi is reproduced") {
    EdgeTrace phi = hat_phi(X, M, 0);
    EdgeTrace p = projection_pil(X, M, 0, phi);
    for (std::size_t k = 0; k < p.v.size(); ++k) CHECK(std::abs(p.v[k] - phi.v[k]) < 1e-14);
  }
  SUBCASE("vanishes at the edge endpoints") {
    EdgeTrace p = projection_pil(X, M, 0, [](double s) { return 1 + s * s; });
    CHECK(p.v.front() == 0.0);
    CHECK(p.v.back() == 0.0);
  }
}

TEST_CASE("designated tip: interior node nearest the midpoint, ties to the left") {
  XSpace X = two_squares(6, 5);
  MSpace M = build_m_space(X, Grouping::Whole);
  const auto& bp = X.lag_trace(0).breakpoints;
  // 6 trace elements on [0,1]: nodes at k/6, midpoint 1/2 is node 3
  CHECK(bp[M.dofs[0].tip] == doctest::Approx(0.5));
  MSpace P = build_m_space(X, Grouping::Pairs);
  for (const auto& m : P.dofs) {
    // each pair [2j/6, (2j+2)/6] has a unique interior node
    CHECK(bp[m.tip] > m.a);
    CHECK(bp[m.tip] < m.b);
  }
  // 3 trace elements: nodes 1/3 and 2/3 are equally close to the midpoint, take the left
  XSpace Y = two_squares(3, 2);
  MSpace W = build_m_space(Y, Grouping::Whole);
  CHECK(Y.lag_trace(0).breakpoints[W.dofs[0].tip] == doctest::Approx(1.0 / 3));
}

TEST_CASE("pi_l laws on random piecewise-linear input") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Preset p : {Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
    StepDiscretization D = discretize(build_decomposition(p), default_schedule(p), 3, Grouping::Pairs);
    for (int e = 0; e < static_cast<int>(D.X.decomposition().interfaces.size()); ++e)
      for (int trial = 0; trial < 10; ++trial) {
        // random piecewise-linear v on a grid unrelated to the trace mesh
        PiecewiseLinear v;
        double L = D.X.decomposition().interfaces[e].length();
        for (int k = 0; k <= 17; ++k) {
          v.s.push_back(L * k / 17);
          v.v.push_back(u(rng));
        }
        EdgeTrace pv = projection_pil(D.X, D.M, e, v);
        EdgeTrace ppv = projection_pil(D.X, D.M, e, pv);
        for (int m = D.M.offset(e); m < D.M.offset(e + 1); ++m) {
          const MDof& J = D.M.dofs[m];
          double scale = std::sqrt((J.b - J.a) * v.squared_integral());
          CHECK(std::abs(v.integral(J.a, J.b) - pv.integral(J.a, J.b)) <= 1e-12 * std::max(scale, 1e-300));
          // L2 bound on J; both are piecewise linear, integrate squares exactly
          auto sq = [](const PiecewiseLinear& f, double a, double b) {
            std::vector<double> s = {a, b};
            for (double t : f.s)
              if (t > a && t < b) s.push_back(t);
            std::sort(s.begin(), s.end());
            double r = 0;
            for (std::size_t i = 0; i + 1 < s.size(); ++i) {
              double fa = f(s[i]), fb = f(s[i + 1]);
              r += (s[i + 1] - s[i]) * (fa * fa + fa * fb + fb * fb) / 3;
            }
            return r;
          };
          double a2 = sq(pv, J.a, J.b), b2 = sq(v, J.a, J.b);
          CHECK(std::sqrt(a2) <= (std::sqrt(4.0 / 3) + 1e-9) * std::sqrt(b2));
        }
        REQUIRE(ppv.v.size() == pv.v.size());
        for (std::size_t k = 0; k < pv.v.size(); ++k) CHECK(std::abs(ppv.v[k] - pv.v[k]) < 1e-14);
      }
  }
}

TEST_CASE("inf-sup test function") {
  XSpace X = two_squares(2, 3);
  MSpace M = build_m_space(X, Grouping::Whole);
  Eigen::MatrixXd B = assemble_B(X, M);
  SUBCASE("mu = 1 on one J: w = phi, b(v, mu) = |J|/2") {
    Eigen::VectorXd mu = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd v = infsup_test_function(X, M, mu);
    EdgeTrace phi = hat_phi(X, M, 0);
    PiecewiseLinear j = jump(X, v, 0);
    for (double s : phi.s) CHECK(std::abs(j(s) - phi(s)) < 1e-15);
    CHECK(std::abs(B.row(0).dot(v) - 0.5) < 1e-15);
  }
  SUBCASE("mu = 0") { CHECK(infsup_test_function(X, M, Eigen::VectorXd::Zero(1)).isZero(0)); }
  SUBCASE("<w, mu> / ||mu||^2 in [1/2, 1] for random mu") {
    for (Preset p : {Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
      StepDiscretization D = discretize(build_decomposition(p), default_schedule(p), 2, Grouping::Pairs);
      Eigen::MatrixXd BB = assemble_B(D.X, D.M);
      Eigen::VectorXd len = D.M.lengths();
      for (unsigned seed = 1; seed <= 5; ++seed) {
        Eigen::VectorXd mu = random_vector(D.M.dim(), seed);
        Eigen::VectorXd v = infsup_test_function(D.X, D.M, mu);
        double num = mu.dot(BB * v), den = mu.dot(len.cwiseProduct(mu));
        CHECK(num / den >= 0.5 - 1e-12);
        CHECK(num / den <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("zero-mean jump correction") {
  for (Preset p : {Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
    StepDiscretization D = discretize(build_decomposition(p), default_schedule(p), 2, Grouping::Pairs);
    Eigen::MatrixXd B = assemble_B(D.X, D.M);
    for (unsigned seed = 1; seed <= 5; ++seed) {
      Eigen::VectorXd w = random_vector(D.X.dim(), seed);
      Eigen::VectorXd v = mean_jump_correction(D.X, D.M, w);
      CHECK((B * v).cwiseAbs().maxCoeff() <= 1e-12 * B.norm() * v.norm());
      // the correction only touches lag-side edge nodes
      CHECK((B * w).cwiseAbs().maxCoeff() > 1e-6);
    }
  }
}
