#pragma once

#include "mortar/geometry.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mortar {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Segment {
  Vec2 a, b;
  double length() const { return (b - a).norm(); }
};

// gamma_l between sub-domains lag and mor; parameterized by arc length from a,
// the lexicographically smaller endpoint.
struct InterfaceEdge {
  int id = 0;
  int lag = 0;
  int mor = 0;
  Segment segment;
  double length() const { return segment.length(); }
  Vec2 point(double s) const { return segment.a + s * (segment.b - segment.a) / length(); }
  double coordinate(const Vec2& x) const { return (x - segment.a).dot(segment.b - segment.a) / length(); }
  bool contains(const Vec2& x, double tol) const;
};

struct Decomposition {
  std::string name;
  std::vector<Polygon> subdomains;  // counter-clockwise vertex loops
  std::vector<InterfaceEdge> interfaces;
  std::vector<Segment> outer_boundary;  // pieces of the sub-domain boundaries on dGamma

  int size() const { return static_cast<int>(subdomains.size()); }
  Shape shape(int i) const { return subdomains[i].size() == 3 ? Shape::Triangle : Shape::Rectangle; }
  double area() const;
  bool on_outer_boundary(const Vec2& x, double tol) const;
};

// Lag/mor choice for an interface edge that is an entire edge of both sides.
struct LagOverride {
  int a, b;  // sub-domain pair
  int lag;
};

// Builds a decomposition from polygons: extracts interface edges, checks
// (A1), non-overlap and gaps, and computes the outer boundary. When the shared
// segment is an entire edge of both sides the lag side comes from `overrides`,
// else the lower index.
Decomposition make_decomposition(std::string name, std::vector<Polygon> polygons,
                                 const std::vector<LagOverride>& overrides = {});

enum class Preset { Exp1, Exp2, Exp3, Exp4, Custom };
Preset parse_preset(const std::string& s);
const char* to_string(Preset p);

// Slide counts per sub-domain and direction at step k = 1, 2, ...:
// n = initial + (k-1) * increment.
struct SlideSchedule {
  std::vector<std::array<int, 2>> initial;
  std::vector<std::array<int, 2>> increment;
  std::array<int, 2> slides(int subdomain, int step) const;
  int size() const { return static_cast<int>(initial.size()); }
};

SlideSchedule default_schedule(Preset p);

// Preset geometry. The lag side of each interface is the side with more trace
// elements at step 1, then at step 2, then the lower index; exp4 uses the fixed
// assignment gamma_12, gamma_23 -> Gamma_2 and gamma_13 -> Gamma_1.
Decomposition build_decomposition(Preset p, const SlideSchedule& schedule);
Decomposition build_decomposition(Preset p);
// Custom decomposition from the plain-text format documented in README.
Decomposition load_decomposition(const std::string& path);
Decomposition parse_decomposition(const std::string& text, const std::string& name = "custom");

struct SubdomainMesh {
  int subdomain = 0;
  Polygon polygon;
  std::vector<Vec2> nodes;
  std::vector<Panel> elements;
  std::vector<std::vector<int>> element_nodes;  // in Panel vertex order
  double h = 0;                                 // longest element edge
  std::array<int, 2> slides{0, 0};

  double min_diameter() const;
  double max_diameter() const;
  double quasi_uniformity() const { return max_diameter() / min_diameter(); }
};

SubdomainMesh build_subdomain_mesh(const Decomposition& d, int i, int n);
SubdomainMesh build_subdomain_mesh(const Decomposition& d, int i, int nx, int ny);

struct TracePartition {
  int edge = 0;
  int subdomain = 0;             // side the trace comes from
  std::vector<double> breakpoints;
  std::vector<int> nodes;        // mesh node per breakpoint
  int elements() const { return static_cast<int>(breakpoints.size()) - 1; }
};

TracePartition extract_trace_partition(const SubdomainMesh& mesh, const InterfaceEdge& edge);

enum class Grouping {
  Pairs,     // join two trace elements, one group of three for odd counts
  Whole,     // one multiplier element per edge
  Identity   // multiplier mesh = trace mesh; violates (A2)
};
Grouping parse_grouping(const std::string& s);
const char* to_string(Grouping g);

struct MultiplierPartition {
  int edge = 0;
  std::vector<double> breakpoints;
  std::vector<std::array<int, 2>> trace_range;  // trace element range [first, last) per element
  int elements() const { return static_cast<int>(breakpoints.size()) - 1; }
  double width() const;  // longest element
};

MultiplierPartition build_multiplier_partition(const TracePartition& trace, Grouping g);

// (A2) by interval inclusion: multiplier breakpoints are trace breakpoints
// including both ends, and every multiplier element is a union of at least
// two consecutive trace elements, so it contains an interior trace node with
// both neighbouring trace elements inside.
bool satisfies_A2(const TracePartition& trace, const MultiplierPartition& m, std::string* why = nullptr);

struct ValidationReport {
  bool a1 = true;
  bool a2 = true;
  bool tiling = true;
  bool quasi_uniform = true;
  std::vector<std::string> issues;
  std::vector<double> h;            // per sub-domain
  std::vector<double> quasi_ratio;  // per sub-domain
  std::vector<double> k;            // per interface
  double h_max = 0, h_min = 0, k_max = 0;
  bool ok() const { return a1 && a2 && tiling && quasi_uniform; }
};

ValidationReport validate_decomposition(const Decomposition& d, const std::vector<SubdomainMesh>& meshes,
                                        const std::vector<MultiplierPartition>& multipliers,
                                        double quasi_bound = 4.0);

}  // namespace mortar
