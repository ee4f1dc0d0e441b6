#pragma once

#include "mortar/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace mortar {

enum class Side { Lag, Mor };
const char* to_string(Side s);

// Sparse linear combination of global X-space DOFs.
using Combination = std::vector<std::pair<int, double>>;

struct PiecewiseLinear {
  std::vector<double> s;  // sorted breakpoints
  std::vector<double> v;  // values at breakpoints
  double operator()(double t) const;
  double integral(double a, double b) const;
  double integral() const { return s.empty() ? 0.0 : integral(s.front(), s.back()); }
  double squared_integral() const;  // exact int v^2
};

// Value of a side's sub-domain function on an edge.
struct EdgeTrace : PiecewiseLinear {
  int edge = 0;
  Side side = Side::Lag;
};

// Restriction map of one side's functions to an edge: per breakpoint, the
// trace value as a combination of DOFs. Breakpoints include both edge
// endpoints; mor-side endpoints may be interpolated (hanging cross-points).
struct TraceMap {
  int edge = 0;
  int subdomain = 0;
  Side side = Side::Lag;
  std::vector<double> breakpoints;
  std::vector<Combination> values;
  Combination at(double s) const;
};

struct Dof {
  int subdomain = 0;
  int node = 0;
  Vec2 x;
};

class XSpace {
 public:
  XSpace() = default;
  XSpace(Decomposition d, std::vector<SubdomainMesh> meshes);

  int dim() const { return static_cast<int>(dofs_.size()); }
  const std::vector<Dof>& dofs() const { return dofs_; }
  const Decomposition& decomposition() const { return d_; }
  const std::vector<SubdomainMesh>& meshes() const { return meshes_; }
  const SubdomainMesh& mesh(int i) const { return meshes_.at(i); }
  // Global DOF of a node, -1 if the node lies on the outer boundary.
  int dof(int subdomain, int node) const { return node_dof_[subdomain][node]; }
  int offset(int subdomain) const { return offset_[subdomain]; }
  int count(int subdomain) const { return offset_[subdomain + 1] - offset_[subdomain]; }
  const TraceMap& trace_map(int edge, Side side) const { return traces_[2 * edge + (side == Side::Mor)]; }
  const TracePartition& lag_trace(int edge) const { return lag_partitions_[edge]; }

 private:
  Decomposition d_;
  std::vector<SubdomainMesh> meshes_;
  std::vector<std::vector<int>> node_dof_;
  std::vector<int> offset_;
  std::vector<Dof> dofs_;
  std::vector<TraceMap> traces_;
  std::vector<TracePartition> lag_partitions_;
};

// DOFs sub-domain-major, nodes ordered lexicographically by (x1, x2).
XSpace build_x_space(const Decomposition& d, std::vector<SubdomainMesh> meshes);

struct MDof {
  int edge = 0;
  int element = 0;
  double a = 0, b = 0;  // interval on the edge
  int tip = 0;          // designated interior trace node (index into the lag trace breakpoints)
};

class MSpace {
 public:
  int dim() const { return static_cast<int>(dofs.size()); }
  int offset(int edge) const { return offsets[edge]; }
  std::vector<MultiplierPartition> partitions;  // per edge
  std::vector<MDof> dofs;                       // edge-major
  std::vector<int> offsets;
  // Diagonal of the L2(gamma) Gram: element lengths.
  Eigen::VectorXd lengths() const;
};

// Validates (A2) of each partition against the lag trace of its edge.
MSpace build_m_space(const XSpace& X, std::vector<MultiplierPartition> partitions);
MSpace build_m_space(const XSpace& X, Grouping g);

EdgeTrace trace_on_edge(const XSpace& X, const Eigen::VectorXd& x, Side side, int edge);
// [x] = lag - mor on the union of both breakpoint sets.
PiecewiseLinear jump(const XSpace& X, const Eigen::VectorXd& x, int edge);
// Union of lag, mor and (optionally) multiplier breakpoints of an edge.
std::vector<double> merged_breakpoints(const XSpace& X, int edge, const MSpace* M = nullptr);

// E_l: the lag trace values v at the lag-side edge nodes, zero elsewhere;
// returns a global X vector. Throws if v is nonzero at a boundary node.
Eigen::VectorXd extension_El(const XSpace& X, const EdgeTrace& v);

// Hat with tip at the designated node of J, on the lag trace breakpoints.
EdgeTrace hat_phi(const XSpace& X, const MSpace& M, int mdof);
// pi_l v = sum_J (2/|J|) (int_J v) phi_{l,J}, on the lag trace breakpoints.
EdgeTrace projection_pil(const XSpace& X, const MSpace& M, int edge, const PiecewiseLinear& v);
EdgeTrace projection_pil(const XSpace& X, const MSpace& M, int edge, const std::function<double(double)>& v);

// v = sum_l E_l w_l with w_l = mu(J) phi_{l,J} on each J.
Eigen::VectorXd infsup_test_function(const XSpace& X, const MSpace& M, const Eigen::VectorXd& mu);

// w - sum_l E_l pi_l([w]); the result has zero jump mean on every J.
Eigen::VectorXd mean_jump_correction(const XSpace& X, const MSpace& M, const Eigen::VectorXd& w);

// Nodal interpolant of g on every sub-domain (boundary DOFs do not exist).
Eigen::VectorXd interpolate(const XSpace& X, const std::function<double(const Vec2&)>& g);

// Value of the sub-domain function at a point of sub-domain i.
double evaluate(const XSpace& X, const Eigen::VectorXd& x, int subdomain, const Vec2& p);

// "dof,subdomain,x,y" rows.
void write_dof_csv(std::ostream& os, const XSpace& X);
void write_mdof_csv(std::ostream& os, const MSpace& M);

}  // namespace mortar
