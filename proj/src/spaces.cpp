#include "mortar/spaces.hpp"

#include "mortar/quadrature.hpp"
#include "mortar/shape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace mortar {

const char* to_string(Side s) { return s == Side::Lag ? "lag" : "mor"; }

namespace {

std::size_t piece_index(const std::vector<double>& s, double t) {
  auto it = std::upper_bound(s.begin(), s.end(), t);
  std::size_t k = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
  return std::min(k, s.size() - 2);
}

void add_scaled(Combination& out, const Combination& c, double w) {
  if (w == 0) return;
  for (const auto& [dof, a] : c) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == dof; });
    if (it == out.end()) out.emplace_back(dof, w * a);
    else it->second += w * a;
  }
}

double apply(const Combination& c, const Eigen::VectorXd& x) {
  double v = 0;
  for (const auto& [dof, w] : c) v += w * x(dof);
  return v;
}

TraceMap build_trace_map(const XSpace& X, const SubdomainMesh& m, const InterfaceEdge& e, Side side) {
  const double L = e.length();
  const double tol = 1e-10 * std::max(L, m.h);
  const Vec2 t = (e.segment.b - e.segment.a) / L;
  auto off_line = [&](const Vec2& x) { return std::abs(cross(t, x - e.segment.a)); };
  struct Piece {
    double a, b;
    Combination ca, cb;
  };
  std::vector<Piece> pieces;
  for (const auto& en : m.element_nodes) {
    const std::size_t nv = en.size();
    for (std::size_t k = 0; k < nv; ++k) {
      int n0 = en[k], n1 = en[(k + 1) % nv];
      const Vec2 &x0 = m.nodes[n0], &x1 = m.nodes[n1];
      if (off_line(x0) > tol || off_line(x1) > tol) continue;
      double s0 = e.coordinate(x0), s1 = e.coordinate(x1);
      if (s0 > s1) std::swap(s0, s1), std::swap(n0, n1);
      double a = std::max(s0, 0.0), b = std::min(s1, L);
      if (b - a <= tol) continue;
      if (std::abs(a) <= tol) a = 0.0;
      if (std::abs(b - L) <= tol) b = L;
      auto combo = [&](double s) {
        double w1 = (s - s0) / (s1 - s0);
        if (std::abs(w1) < 1e-14) w1 = 0;
        if (std::abs(1 - w1) < 1e-14) w1 = 1;
        Combination c;
        int d0 = X.dof(m.subdomain, n0), d1 = X.dof(m.subdomain, n1);
        if (d0 >= 0 && w1 != 1) c.emplace_back(d0, 1 - w1);
        if (d1 >= 0 && w1 != 0) c.emplace_back(d1, w1);
        return c;
      };
      pieces.push_back({a, b, combo(a), combo(b)});
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.a < q.a; });
  if (pieces.empty() || pieces.front().a != 0.0 || pieces.back().b != L)
    throw MeshError("interface " + std::to_string(e.id + 1) + " is not covered by the boundary of sub-domain " +
                    std::to_string(m.subdomain + 1));
  TraceMap tm;
  tm.edge = e.id;
  tm.subdomain = m.subdomain;
  tm.side = side;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (k > 0 && std::abs(pieces[k].a - pieces[k - 1].b) > tol)
      throw MeshError("interface " + std::to_string(e.id + 1) + ": gap in the trace of sub-domain " +
                      std::to_string(m.subdomain + 1));
    tm.breakpoints.push_back(k == 0 ? 0.0 : pieces[k - 1].b);
    tm.values.push_back(pieces[k].ca);
  }
  tm.breakpoints.push_back(L);
  tm.values.push_back(pieces.back().cb);
  return tm;
}

}  // namespace

double PiecewiseLinear::operator()(double t) const {
  if (s.size() == 1) return v[0];
  std::size_t k = piece_index(s, t);
  double w = (t - s[k]) / (s[k + 1] - s[k]);
  return (1 - w) * v[k] + w * v[k + 1];
}

double PiecewiseLinear::integral(double a, double b) const {
  double total = 0;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    double lo = std::max(a, s[k]), hi = std::min(b, s[k + 1]);
    if (hi <= lo) continue;
    total += 0.5 * (hi - lo) * ((*this)(lo) + (*this)(hi));
  }
  return total;
}

double PiecewiseLinear::squared_integral() const {
  double total = 0;
  for (std::size_t k = 0; k + 1 < s.size(); ++k)
    total += (s[k + 1] - s[k]) / 3.0 * (v[k] * v[k] + v[k] * v[k + 1] + v[k + 1] * v[k + 1]);
  return total;
}

Combination TraceMap::at(double s) const {
  std::size_t k = piece_index(breakpoints, s);
  const double len = breakpoints[k + 1] - breakpoints[k];
  double w = (s - breakpoints[k]) / len;
  if (std::abs(w) < 1e-13) return values[k];
  if (std::abs(1 - w) < 1e-13) return values[k + 1];
  Combination c;
  add_scaled(c, values[k], 1 - w);
  add_scaled(c, values[k + 1], w);
  return c;
}

XSpace::XSpace(Decomposition d, std::vector<SubdomainMesh> meshes) : d_(std::move(d)), meshes_(std::move(meshes)) {
  if (static_cast<int>(meshes_.size()) != d_.size())
    throw MeshError("build_x_space: one mesh per sub-domain is required");
  double extent = 0;
  for (const auto& p : d_.subdomains)
    for (const auto& a : p)
      for (const auto& b : p) extent = std::max(extent, (a - b).norm());
  const double tol = 1e-10 * extent;
  offset_.push_back(0);
  node_dof_.resize(meshes_.size());
  for (std::size_t i = 0; i < meshes_.size(); ++i) {
    const auto& m = meshes_[i];
    if (m.subdomain != static_cast<int>(i)) throw MeshError("build_x_space: meshes out of order");
    std::vector<int> order(m.nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Vec2 &p = m.nodes[a], &q = m.nodes[b];
      return p(0) < q(0) || (p(0) == q(0) && p(1) < q(1));
    });
    node_dof_[i].assign(m.nodes.size(), -1);
    for (int n : order) {
      if (d_.on_outer_boundary(m.nodes[n], tol)) continue;
      node_dof_[i][n] = static_cast<int>(dofs_.size());
      dofs_.push_back({static_cast<int>(i), n, m.nodes[n]});
    }
    offset_.push_back(static_cast<int>(dofs_.size()));
  }
  for (const auto& e : d_.interfaces) {
    traces_.push_back(build_trace_map(*this, meshes_[e.lag], e, Side::Lag));
    traces_.push_back(build_trace_map(*this, meshes_[e.mor], e, Side::Mor));
    lag_partitions_.push_back(extract_trace_partition(meshes_[e.lag], e));
    const auto& lag = traces_[traces_.size() - 2];
    if (lag.breakpoints.size() != lag_partitions_.back().breakpoints.size())
      throw MeshError("interface " + std::to_string(e.id + 1) + ": lag trace mesh is not conforming on the edge");
  }
}

XSpace build_x_space(const Decomposition& d, std::vector<SubdomainMesh> meshes) {
  return XSpace(d, std::move(meshes));
}

Eigen::VectorXd MSpace::lengths() const {
  Eigen::VectorXd l(dim());
  for (int i = 0; i < dim(); ++i) l(i) = dofs[i].b - dofs[i].a;
  return l;
}

MSpace build_m_space(const XSpace& X, std::vector<MultiplierPartition> partitions) {
  const auto& d = X.decomposition();
  if (partitions.size() != d.interfaces.size())
    throw MeshError("build_m_space: one multiplier partition per interface edge is required");
  MSpace M;
  for (std::size_t l = 0; l < partitions.size(); ++l) {
    const auto& mp = partitions[l];
    if (mp.edge != static_cast<int>(l)) throw MeshError("build_m_space: partitions out of order");
    const TracePartition& tr = X.lag_trace(static_cast<int>(l));
    std::string why;
    if (!satisfies_A2(tr, mp, &why)) throw MeshError("interface " + std::to_string(l + 1) + ": " + why);
    M.offsets.push_back(M.dim());
    for (int j = 0; j < mp.elements(); ++j) {
      MDof m;
      m.edge = static_cast<int>(l);
      m.element = j;
      m.a = mp.breakpoints[j];
      m.b = mp.breakpoints[j + 1];
      const double mid = 0.5 * (m.a + m.b), tie = 1e-12 * (m.b - m.a);
      int best = -1;
      for (int k = mp.trace_range[j][0] + 1; k < mp.trace_range[j][1]; ++k)
        if (best < 0 || std::abs(tr.breakpoints[k] - mid) < std::abs(tr.breakpoints[best] - mid) - tie) best = k;
      if (best < 0)
        throw MeshError("interface " + std::to_string(l + 1) + ": multiplier element " + std::to_string(j + 1) +
                        " has no interior trace node");
      m.tip = best;
      M.dofs.push_back(m);
    }
  }
  M.offsets.push_back(M.dim());
  M.partitions = std::move(partitions);
  return M;
}

MSpace build_m_space(const XSpace& X, Grouping g) {
  std::vector<MultiplierPartition> parts;
  for (std::size_t l = 0; l < X.decomposition().interfaces.size(); ++l)
    parts.push_back(build_multiplier_partition(X.lag_trace(static_cast<int>(l)), g));
  return build_m_space(X, std::move(parts));
}

EdgeTrace trace_on_edge(const XSpace& X, const Eigen::VectorXd& x, Side side, int edge) {
  if (x.size() != X.dim()) throw std::invalid_argument("trace_on_edge: coefficient vector has wrong size");
  const TraceMap& tm = X.trace_map(edge, side);
  EdgeTrace t;
  t.edge = edge;
  t.side = side;
  t.s = tm.breakpoints;
  for (const auto& c : tm.values) t.v.push_back(apply(c, x));
  return t;
}

std::vector<double> merged_breakpoints(const XSpace& X, int edge, const MSpace* M) {
  std::vector<double> s = X.trace_map(edge, Side::Lag).breakpoints;
  const auto& mor = X.trace_map(edge, Side::Mor).breakpoints;
  s.insert(s.end(), mor.begin(), mor.end());
  if (M) {
    const auto& mb = M->partitions.at(edge).breakpoints;
    s.insert(s.end(), mb.begin(), mb.end());
  }
  std::sort(s.begin(), s.end());
  const double tol = 1e-12 * X.decomposition().interfaces[edge].length();
  std::vector<double> out;
  for (double t : s)
    if (out.empty() || t - out.back() > tol) out.push_back(t);
  out.back() = s.back();
  return out;
}

PiecewiseLinear jump(const XSpace& X, const Eigen::VectorXd& x, int edge) {
  EdgeTrace lag = trace_on_edge(X, x, Side::Lag, edge);
  EdgeTrace mor = trace_on_edge(X, x, Side::Mor, edge);
  PiecewiseLinear j;
  j.s = merged_breakpoints(X, edge);
  for (double t : j.s) j.v.push_back(lag(t) - mor(t));
  return j;
}

Eigen::VectorXd extension_El(const XSpace& X, const EdgeTrace& v) {
  const TracePartition& tr = X.lag_trace(v.edge);
  if (v.side != Side::Lag || v.s.size() != tr.breakpoints.size())
    throw std::invalid_argument("extension_El: values must live on the lag trace partition");
  const int lag = X.decomposition().interfaces[v.edge].lag;
  double scale = 0;
  for (double a : v.v) scale = std::max(scale, std::abs(a));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(X.dim());
  for (std::size_t k = 0; k < tr.nodes.size(); ++k) {
    int dof = X.dof(lag, tr.nodes[k]);
    if (dof < 0) {
      if (std::abs(v.v[k]) > 1e-14 * scale)
        throw std::invalid_argument("extension_El: nonzero value at a node on the outer boundary");
      continue;
    }
    out(dof) = v.v[k];
  }
  return out;
}

EdgeTrace hat_phi(const XSpace& X, const MSpace& M, int mdof) {
  const MDof& m = M.dofs.at(mdof);
  const TracePartition& tr = X.lag_trace(m.edge);
  const auto& range = M.partitions[m.edge].trace_range[m.element];
  EdgeTrace h;
  h.edge = m.edge;
  h.side = Side::Lag;
  h.s = tr.breakpoints;
  h.v.assign(h.s.size(), 0.0);
  const double tip = tr.breakpoints[m.tip];
  for (int k = range[0] + 1; k < range[1]; ++k) {
    double s = tr.breakpoints[k];
    h.v[k] = k == m.tip ? 1.0 : (s < tip ? (s - m.a) / (tip - m.a) : (m.b - s) / (m.b - tip));
  }
  return h;
}

namespace {

EdgeTrace combine_hats(const XSpace& X, const MSpace& M, int edge, const std::vector<double>& coef) {
  EdgeTrace out;
  out.edge = edge;
  out.side = Side::Lag;
  out.s = X.lag_trace(edge).breakpoints;
  out.v.assign(out.s.size(), 0.0);
  for (int j = M.offset(edge); j < M.offset(edge + 1); ++j) {
    if (coef[j - M.offset(edge)] == 0) continue;
    EdgeTrace h = hat_phi(X, M, j);
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] += coef[j - M.offset(edge)] * h.v[k];
  }
  return out;
}

}  // namespace

EdgeTrace projection_pil(const XSpace& X, const MSpace& M, int edge, const PiecewiseLinear& v) {
  std::vector<double> coef;
  for (int j = M.offset(edge); j < M.offset(edge + 1); ++j) {
    const MDof& m = M.dofs[j];
    coef.push_back(2.0 / (m.b - m.a) * v.integral(m.a, m.b));
  }
  return combine_hats(X, M, edge, coef);
}

EdgeTrace projection_pil(const XSpace& X, const MSpace& M, int edge, const std::function<double(double)>& v) {
  const auto& tr = X.lag_trace(edge).breakpoints;
  std::vector<double> coef;
  for (int j = M.offset(edge); j < M.offset(edge + 1); ++j) {
    const MDof& m = M.dofs[j];
    const auto& range = M.partitions[edge].trace_range[m.element];
    double mean = 0;
    for (int k = range[0]; k < range[1]; ++k) mean += adaptive_gk15(v, tr[k], tr[k + 1], 1e-13, 1e-300).value;
    coef.push_back(2.0 / (m.b - m.a) * mean);
  }
  return combine_hats(X, M, edge, coef);
}

Eigen::VectorXd infsup_test_function(const XSpace& X, const MSpace& M, const Eigen::VectorXd& mu) {
  if (mu.size() != M.dim()) throw std::invalid_argument("infsup_test_function: multiplier vector has wrong size");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(X.dim());
  for (std::size_t l = 0; l < M.partitions.size(); ++l) {
    int e = static_cast<int>(l);
    std::vector<double> coef(mu.data() + M.offset(e), mu.data() + M.offset(e + 1));
    v += extension_El(X, combine_hats(X, M, e, coef));
  }
  return v;
}

Eigen::VectorXd mean_jump_correction(const XSpace& X, const MSpace& M, const Eigen::VectorXd& w) {
  Eigen::VectorXd v = w;
  for (std::size_t l = 0; l < M.partitions.size(); ++l) {
    int e = static_cast<int>(l);
    v -= extension_El(X, projection_pil(X, M, e, jump(X, w, e)));
  }
  return v;
}

Eigen::VectorXd interpolate(const XSpace& X, const std::function<double(const Vec2&)>& g) {
  Eigen::VectorXd x(X.dim());
  for (int k = 0; k < X.dim(); ++k) x(k) = g(X.dofs()[k].x);
  return x;
}

double evaluate(const XSpace& X, const Eigen::VectorXd& x, int subdomain, const Vec2& p) {
  const SubdomainMesh& m = X.mesh(subdomain);
  const double tol = 1e-12 * std::max(1.0, m.h);
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    if (!point_in_convex(p, m.elements[e].v, tol)) continue;
    auto f = shape_functions(m.elements[e]);
    double val = 0;
    for (std::size_t a = 0; a < f.size(); ++a) {
      int dof = X.dof(subdomain, m.element_nodes[e][a]);
      if (dof >= 0) val += x(dof) * f[a](p);
    }
    return val;
  }
  throw std::invalid_argument("evaluate: point outside the sub-domain");
}

void write_dof_csv(std::ostream& os, const XSpace& X) {
  os << "dof,subdomain,x,y\n";
  char buf[128];
  for (int k = 0; k < X.dim(); ++k) {
    const Dof& d = X.dofs()[k];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", k, d.subdomain + 1, d.x(0), d.x(1));
    os << buf;
  }
}

void write_mdof_csv(std::ostream& os, const MSpace& M) {
  os << "mdof,edge,a,b\n";
  char buf[128];
  for (int k = 0; k < M.dim(); ++k) {
    const MDof& d = M.dofs[k];
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", k, d.edge + 1, d.a, d.b);
    os << buf;
  }
}

}  // namespace mortar
