#include "doctest.h"

#include "mortar/experiment.hpp"
#include "mortar/mesh.hpp"

#include <cmath>

using namespace mortar;

namespace {

TracePartition uniform_trace(int m, double s = 1.0) {
  TracePartition t;
  for (int i = 0; i <= m; ++i) {
    t.breakpoints.push_back(s * i / m);
    t.nodes.push_back(i);
  }
  return t;
}

std::vector<SubdomainMesh> meshes_at(const Decomposition& d, const SlideSchedule& s, int step) {
  std::vector<SubdomainMesh> m;
  for (int i = 0; i < d.size(); ++i) {
    auto n = s.slides(i, step);
    m.push_back(build_subdomain_mesh(d, i, n[0], n[1]));
  }
  return m;
}

}  // namespace

TEST_CASE("exp1 is four congruent quadrants meeting at the centre") {
  Decomposition d = build_decomposition(Preset::Exp1);
  REQUIRE(d.size() == 4);
  CHECK(d.interfaces.size() == 4);
  for (const auto& p : d.subdomains) CHECK(std::abs(polygon_area(p) - 0.25) < 1e-14);
  CHECK(std::abs(d.area() - 1.0) < 1e-14);
  for (const auto& e : d.interfaces) {
    CHECK(e.lag != e.mor);
    CHECK(std::abs(e.length() - 0.5) < 1e-14);
    bool centre = (e.segment.a - Vec2(0.5, 0.5)).norm() < 1e-14 || (e.segment.b - Vec2(0.5, 0.5)).norm() < 1e-14;
    CHECK(centre);
  }
}

TEST_CASE("interface endpoints are consecutive vertices of the lag polygon") {
  for (Preset p : {Preset::Exp1, Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
    Decomposition d = build_decomposition(p);
    for (const auto& e : d.interfaces) {
      const Polygon& P = d.subdomains[e.lag];
      bool found = false;
      for (std::size_t k = 0; k < P.size(); ++k) {
        const Vec2 &u = P[k], &v = P[(k + 1) % P.size()];
        if ((u == e.segment.a && v == e.segment.b) || (u == e.segment.b && v == e.segment.a)) found = true;
      }
      CHECK_MESSAGE(found, to_string(p), " interface ", e.id);
      // canonical orientation: lexicographically smaller endpoint first
      bool ordered = e.segment.a(0) < e.segment.b(0) ||
                     (e.segment.a(0) == e.segment.b(0) && e.segment.a(1) < e.segment.b(1));
      CHECK(ordered);
    }
  }
}

TEST_CASE("custom single square has no interfaces") {
  Decomposition d = parse_decomposition("# unit square\nsubdomain 0 0 1 0 1 1 0 1\n");
  CHECK(d.size() == 1);
  CHECK(d.interfaces.empty());
  CHECK(std::abs(d.area() - 1.0) < 1e-15);
}

TEST_CASE("custom decomposition file with a lag override") {
  Decomposition d = parse_decomposition(
      "subdomain 0 0 1 0 1 1 0 1\n"
      "subdomain 1 0 2 0 2 1 1 1\n"
      "interface 1 2 lag 2\n");
  REQUIRE(d.interfaces.size() == 1);
  CHECK(d.interfaces[0].lag == 1);
  CHECK(d.interfaces[0].mor == 0);
  CHECK_THROWS_AS(parse_decomposition("subdomain 0 0 1 0 1 1 0 1\nfoo 1\n"), MeshError);
  CHECK_THROWS_AS(parse_decomposition("subdomain 0 0 1 0 1\n"), MeshError);
}

TEST_CASE("triangle sub-domains are accepted") {
  Decomposition d = parse_decomposition(
      "subdomain 0 0 1 0 0 1\n"
      "subdomain 1 0 1 1 0 1\n");
  REQUIRE(d.interfaces.size() == 1);
  SubdomainMesh m = build_subdomain_mesh(d, 0, 3);
  CHECK(m.elements.size() == 9);
  double area = 0;
  for (const auto& e : m.elements) area += e.area();
  CHECK(std::abs(area - 0.5) < 1e-14);
  CHECK(std::abs(m.h - std::sqrt(2.0) / 3) < 1e-14);
}

TEST_CASE("decomposition errors") {
  SUBCASE("overlap") {
    CHECK_THROWS_AS(parse_decomposition("subdomain 0 0 1 0 1 1 0 1\nsubdomain 0.5 0 1.5 0 1.5 1 0.5 1\n"), MeshError);
  }
  SUBCASE("gap") {
    CHECK_THROWS_AS(parse_decomposition("subdomain 0 0 1 0 1 1 0 1\nsubdomain 2 0 3 0 3 1 2 1\n"), MeshError);
  }
  SUBCASE("A1 violation names the segment") {
    // Staggered rectangles: the shared piece is an entire edge of neither.
    try {
      parse_decomposition(
          "subdomain 0 0 1 0 1 1 0 1\n"
          "subdomain 0.5 1 1.5 1 1.5 2 0.5 2\n"
          "subdomain 1 0 2 0 2 1 1 1\n");
      FAIL("expected an (A1) rejection");
    } catch (const MeshError& e) {
      std::string what = e.what();
      CHECK(what.find("(A1)") != std::string::npos);
      CHECK(what.find("(0.5,1)") != std::string::npos);
      CHECK(what.find("(1,1)") != std::string::npos);
    }
  }
  SUBCASE("general quadrilateral") {
    CHECK_THROWS_AS(parse_decomposition("subdomain 0 0 1 0 1.2 1 0 1\n"), MeshError);
  }
}

TEST_CASE("uniform rectangle mesh") {
  Decomposition d = parse_decomposition("subdomain 0 0 1 0 1 1 0 1\n");
  SubdomainMesh m = build_subdomain_mesh(d, 0, 2);
  CHECK(m.elements.size() == 4);
  CHECK(m.nodes.size() == 9);
  CHECK(m.h == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.quasi_uniformity() == doctest::Approx(1.0));
  CHECK_THROWS_AS(build_subdomain_mesh(d, 0, 0), MeshError);
}

TEST_CASE("elements tile each sub-domain") {
  for (Preset p : {Preset::Exp1, Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
    SlideSchedule s = default_schedule(p);
    Decomposition d = build_decomposition(p, s);
    for (int step = 1; step <= 3; ++step)
      for (const auto& m : meshes_at(d, s, step)) {
        double area = 0;
        for (const auto& e : m.elements) area += e.area();
        double exact = polygon_area(d.subdomains[m.subdomain]);
        CHECK(std::abs(area - exact) <= 1e-12 * exact);
      }
  }
}

TEST_CASE("exp4 step 1 mesh widths") {
  SlideSchedule s = default_schedule(Preset::Exp4);
  Decomposition d = build_decomposition(Preset::Exp4, s);
  auto m = meshes_at(d, s, 1);
  CHECK(m[0].h == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(m[1].h == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(m[2].h == doctest::Approx(0.5).epsilon(1e-14));
  // Step 2 of the calibrated schedule: 7, 5 and 3 slides on sides 1/2, 1/2, 1.
  auto m2 = meshes_at(d, s, 2);
  CHECK(m2[0].h == doctest::Approx(1.0 / 14).epsilon(1e-14));
  CHECK(m2[1].h == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m2[2].h == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("trace partitions") {
  Decomposition d = parse_decomposition("subdomain 0 0 0.5 0 0.5 0.5 0 0.5\nsubdomain 0.5 0 1 0 1 0.5 0.5 0.5\n");
  REQUIRE(d.interfaces.size() == 1);
  const InterfaceEdge& e = d.interfaces[0];
  SUBCASE("2x2 right side") {
    TracePartition t = extract_trace_partition(build_subdomain_mesh(d, 0, 2), e);
    REQUIRE(t.breakpoints.size() == 3);
    CHECK(t.breakpoints[0] == 0.0);
    CHECK(t.breakpoints[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(t.breakpoints[2] == 0.5);
  }
  SUBCASE("3x3 gives 4 breakpoints") {
    CHECK(extract_trace_partition(build_subdomain_mesh(d, 1, 3), e).breakpoints.size() == 4);
  }
  SUBCASE("n x n: n+1 equally spaced breakpoints") {
    for (int n = 1; n <= 9; ++n) {
      SubdomainMesh m = build_subdomain_mesh(d, 0, n);
      TracePartition t = extract_trace_partition(m, e);
      REQUIRE(static_cast<int>(t.breakpoints.size()) == n + 1);
      // oracle: enumerate mesh nodes on the edge directly
      std::vector<double> on;
      for (const auto& x : m.nodes)
        if (std::abs(x(0) - 0.5) < 1e-14) on.push_back(x(1));
      std::sort(on.begin(), on.end());
      REQUIRE(on.size() == t.breakpoints.size());
      for (int i = 0; i <= n; ++i) {
        CHECK(std::abs(t.breakpoints[i] - on[i]) < 1e-15);
        CHECK(std::abs(t.breakpoints[i] - 0.5 * i / n) < 1e-15);
      }
    }
  }
  SUBCASE("edge not on the sub-domain") {
    Decomposition d2 = parse_decomposition("subdomain 0 0 1 0 1 1 0 1\n");
    InterfaceEdge far = e;
    far.segment = {Vec2(2, 0), Vec2(2, 1)};
    CHECK_THROWS_AS(extract_trace_partition(build_subdomain_mesh(d2, 0, 2), far), MeshError);
  }
}

TEST_CASE("trace endpoints equal the edge endpoints exactly") {
  for (Preset p : {Preset::Exp1, Preset::Exp2, Preset::Exp3, Preset::Exp4}) {
    SlideSchedule s = default_schedule(p);
    Decomposition d = build_decomposition(p, s);
    auto m = meshes_at(d, s, 2);
    for (const auto& e : d.interfaces) {
      TracePartition t = extract_trace_partition(m[e.lag], e);
      CHECK(t.breakpoints.front() == 0.0);
      CHECK(t.breakpoints.back() == e.length());
      CHECK(m[e.lag].nodes[t.nodes.front()] == e.segment.a);
      CHECK(m[e.lag].nodes[t.nodes.back()] == e.segment.b);
    }
  }
}

TEST_CASE("pair grouping of trace elements") {
  SUBCASE("6 elements -> 3 pairs") {
    auto mp = build_multiplier_partition(uniform_trace(6), Grouping::Pairs);
    CHECK(mp.elements() == 3);
    for (auto r : mp.trace_range) CHECK(r[1] - r[0] == 2);
  }
  SUBCASE("5 elements -> 2 + 3") {
    auto mp = build_multiplier_partition(uniform_trace(5), Grouping::Pairs);
    REQUIRE(mp.elements() == 2);
    CHECK(mp.trace_range[0][1] - mp.trace_range[0][0] == 2);
    CHECK(mp.trace_range[1][1] - mp.trace_range[1][0] == 3);
    CHECK(mp.width() == doctest::Approx(0.6));
  }
  SUBCASE("2 elements -> the whole edge") {
    auto mp = build_multiplier_partition(uniform_trace(2), Grouping::Pairs);
    CHECK(mp.elements() == 1);
    CHECK(mp.breakpoints == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("1 element cannot be coarsened") {
    CHECK_THROWS_AS(build_multiplier_partition(uniform_trace(1), Grouping::Pairs), MeshError);
  }
}

TEST_CASE("A2 checker accepts the pair and whole groupings, rejects identity") {
  for (int m = 2; m <= 13; ++m) {
    TracePartition t = uniform_trace(m);
    CHECK(satisfies_A2(t, build_multiplier_partition(t, Grouping::Pairs)));
    CHECK(satisfies_A2(t, build_multiplier_partition(t, Grouping::Whole)));
    std::string why;
    CHECK_FALSE(satisfies_A2(t, build_multiplier_partition(t, Grouping::Identity), &why));
    CHECK_FALSE(why.empty());
  }
  // a multiplier breakpoint that is not a trace node
  TracePartition t = uniform_trace(4);
  MultiplierPartition bad;
  bad.breakpoints = {0.0, 0.6, 1.0};
  bad.trace_range = {{0, 2}, {2, 4}};
  CHECK_FALSE(satisfies_A2(t, bad));
}

TEST_CASE("validation report") {
  SUBCASE("exp1 passes") {
    SlideSchedule s = default_schedule(Preset::Exp1);
    Decomposition d = build_decomposition(Preset::Exp1, s);
    for (int step = 1; step <= 3; ++step) {
      auto m = meshes_at(d, s, step);
      std::vector<MultiplierPartition> mp;
      for (const auto& e : d.interfaces)
        mp.push_back(build_multiplier_partition(extract_trace_partition(m[e.lag], e), Grouping::Pairs));
      ValidationReport r = validate_decomposition(d, m, mp);
      CHECK(r.a1);
      CHECK(r.a2);
      CHECK(r.ok());
    }
  }
  SUBCASE("identity multiplier mesh fails (A2)") {
    SlideSchedule s = default_schedule(Preset::Exp1);
    Decomposition d = build_decomposition(Preset::Exp1, s);
    auto m = meshes_at(d, s, 1);
    std::vector<MultiplierPartition> mp;
    for (const auto& e : d.interfaces)
      mp.push_back(build_multiplier_partition(extract_trace_partition(m[e.lag], e), Grouping::Identity));
    ValidationReport r = validate_decomposition(d, m, mp);
    CHECK_FALSE(r.a2);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.issues.empty());
  }
  SUBCASE("exp4 step 1 reports h = 0.5") {
    StepDiscretization D = discretize(build_decomposition(Preset::Exp4), default_schedule(Preset::Exp4), 1,
                                      Grouping::Pairs);
    CHECK(D.report.ok());
    CHECK(D.report.h_max == doctest::Approx(0.5));
    CHECK(D.report.h_min == doctest::Approx(0.125));
  }
  SUBCASE("quasi-uniformity bound") {
    Decomposition d = parse_decomposition("subdomain 0 0 1 0 1 1 0 1\n");
    // A hand-built tiling with element diameters 0.14, 0.91 and 1.35.
    SubdomainMesh hand;
    hand.elements = {Panel::rectangle(Vec2(0, 0), Vec2(0.1, 0.1)), Panel::rectangle(Vec2(0.1, 0), Vec2(1, 0.1)),
                     Panel::rectangle(Vec2(0, 0.1), Vec2(1, 1))};
    hand.h = 1.0;
    hand.polygon = d.subdomains[0];
    std::vector<SubdomainMesh> m = {hand};
    CHECK(hand.quasi_uniformity() > 9);
    ValidationReport r = validate_decomposition(d, m, {}, 4.0);
    CHECK_FALSE(r.quasi_uniform);
    CHECK(validate_decomposition(d, m, {}, 10.0).quasi_uniform);
    CHECK(r.tiling);
  }
}

TEST_CASE("matching traces on exp1, non-matching on exp2") {
  auto traces = [](Preset p, int step) {
    SlideSchedule s = default_schedule(p);
    Decomposition d = build_decomposition(p, s);
    auto m = meshes_at(d, s, step);
    std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
    for (const auto& e : d.interfaces)
      out.push_back({extract_trace_partition(m[e.lag], e).breakpoints, extract_trace_partition(m[e.mor], e).breakpoints});
    return out;
  };
  for (int step = 1; step <= 4; ++step) {
    for (const auto& [a, b] : traces(Preset::Exp1, step)) {
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-15);
    }
    for (const auto& [a, b] : traces(Preset::Exp2, step)) CHECK(a.size() != b.size());
  }
}

TEST_CASE("preset names") {
  CHECK(parse_preset("exp1") == Preset::Exp1);
  CHECK(parse_preset("exp1-conforming-4") == Preset::Exp1);
  CHECK(parse_preset("exp4-nonconforming-3") == Preset::Exp4);
  CHECK(parse_preset("custom") == Preset::Custom);
  CHECK_THROWS_AS(parse_preset("exp9"), MeshError);
}

TEST_CASE("lag sides follow the finer step-1 trace") {
  Decomposition d = build_decomposition(Preset::Exp2);
  SlideSchedule s = default_schedule(Preset::Exp2);
  for (const auto& e : d.interfaces) CHECK(s.slides(e.lag, 1)[0] > s.slides(e.mor, 1)[0]);
  // exp4 uses the fixed assignment: gamma_12 and gamma_23 on Gamma_2, gamma_13 on Gamma_1
  Decomposition d4 = build_decomposition(Preset::Exp4);
  for (const auto& e : d4.interfaces) {
    int a = std::min(e.lag, e.mor), b = std::max(e.lag, e.mor);
    if (a == 0 && b == 1) CHECK(e.lag == 1);
    if (a == 1 && b == 2) CHECK(e.lag == 1);
    if (a == 0 && b == 2) CHECK(e.lag == 0);
  }
}
