#include "mortar/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace mortar {

namespace {

constexpr double kRelTol = 1e-10;

double extent(const std::vector<Polygon>& polys) {
  double e = 0;
  for (const auto& p : polys)
    for (const auto& a : p)
      for (const auto& b : p) e = std::max(e, (a - b).norm());
  return e;
}

bool lex_less(const Vec2& a, const Vec2& b) { return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1)); }

Polygon normalize_polygon(Polygon p, int index) {
  if (p.size() != 3 && p.size() != 4)
    throw MeshError("sub-domain " + std::to_string(index + 1) + ": only triangles and rectangles are supported");
  if (polygon_area(p) < 0) std::reverse(p.begin(), p.end());
  if (polygon_area(p) <= 0) throw MeshError("sub-domain " + std::to_string(index + 1) + ": degenerate polygon");
  if (p.size() == 4) {
    for (std::size_t i = 0; i < 4; ++i) {
      Vec2 e = p[(i + 1) % 4] - p[i];
      if (e(0) != 0 && e(1) != 0)
        throw MeshError("sub-domain " + std::to_string(index + 1) + ": quadrilaterals must be axis-aligned rectangles");
    }
    // Start at the lower-left corner.
    auto it = std::min_element(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) {
      return a(0) + a(1) < b(0) + b(1);
    });
    std::rotate(p.begin(), it, p.end());
  }
  return p;
}

// Overlap of segment f with the line segment e, as a parameter range on e.
std::optional<std::pair<double, double>> collinear_overlap(const Vec2& e0, const Vec2& e1, const Vec2& f0,
                                                           const Vec2& f1, double tol) {
  Vec2 d = e1 - e0;
  double L = d.norm();
  auto off = [&](const Vec2& x) { return std::abs(cross(d, x - e0)) / L; };
  if (off(f0) > tol || off(f1) > tol) return std::nullopt;
  double t0 = (f0 - e0).dot(d) / (L * L), t1 = (f1 - e0).dot(d) / (L * L);
  if (t0 > t1) std::swap(t0, t1);
  double lo = std::max(0.0, t0), hi = std::min(1.0, t1);
  if ((hi - lo) * L <= tol) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace

bool InterfaceEdge::contains(const Vec2& x, double tol) const {
  return point_on_segment(x, segment.a, segment.b, tol);
}

double Decomposition::area() const {
  double a = 0;
  for (const auto& p : subdomains) a += polygon_area(p);
  return a;
}

bool Decomposition::on_outer_boundary(const Vec2& x, double tol) const {
  for (const auto& s : outer_boundary)
    if (point_on_segment(x, s.a, s.b, tol)) return true;
  return false;
}

Decomposition make_decomposition(std::string name, std::vector<Polygon> polygons,
                                 const std::vector<LagOverride>& overrides) {
  Decomposition d;
  d.name = std::move(name);
  for (std::size_t i = 0; i < polygons.size(); ++i)
    d.subdomains.push_back(normalize_polygon(polygons[i], static_cast<int>(i)));
  const int N = d.size();
  if (N == 0) throw MeshError("decomposition: no sub-domains");
  const double tol = kRelTol * extent(d.subdomains);

  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      Polygon c = clip_convex(d.subdomains[i], d.subdomains[j]);
      if (c.size() >= 3 && polygon_area(c) > tol * tol * 1e4)
        throw MeshError("decomposition: sub-domains " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                        " overlap");
    }

  // Shared segments per edge, used for interfaces and the outer boundary.
  std::vector<std::vector<std::vector<std::pair<double, double>>>> covered(N);
  for (int i = 0; i < N; ++i) covered[i].resize(d.subdomains[i].size());

  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const Polygon& P = d.subdomains[i];
      const Polygon& Q = d.subdomains[j];
      for (std::size_t e = 0; e < P.size(); ++e)
        for (std::size_t f = 0; f < Q.size(); ++f) {
          const Vec2 &e0 = P[e], &e1 = P[(e + 1) % P.size()];
          const Vec2 &f0 = Q[f], &f1 = Q[(f + 1) % Q.size()];
          auto ov = collinear_overlap(e0, e1, f0, f1, tol);
          if (!ov) continue;
          auto ovq = collinear_overlap(f0, f1, e0, e1, tol);
          covered[i][e].push_back(*ov);
          if (ovq) covered[j][f].push_back(*ovq);
          Vec2 a = e0 + ov->first * (e1 - e0), b = e0 + ov->second * (e1 - e0);
          bool whole_i = (a - e0).norm() <= tol && (b - e1).norm() <= tol;
          bool whole_j = ((a - f0).norm() <= tol && (b - f1).norm() <= tol) ||
                         ((a - f1).norm() <= tol && (b - f0).norm() <= tol);
          if (!whole_i && !whole_j) {
            std::ostringstream os;
            os << "interface between sub-domains " << i + 1 << " and " << j + 1 << " violates (A1): segment ("
               << a(0) << "," << a(1) << ")-(" << b(0) << "," << b(1) << ") is not an entire edge of either";
            throw MeshError(os.str());
          }
          InterfaceEdge ie;
          ie.id = static_cast<int>(d.interfaces.size());
          if (whole_i && whole_j) {
            int lag = i;
            for (const auto& o : overrides)
              if ((o.a == i && o.b == j) || (o.a == j && o.b == i)) lag = o.lag;
            ie.lag = lag;
          } else {
            ie.lag = whole_i ? i : j;
          }
          ie.mor = ie.lag == i ? j : i;
          // Endpoints are the lag polygon's vertices, exactly.
          Vec2 sa = e0, sb = e1;
          if (ie.lag == j) {
            sa = (a - f0).norm() <= tol ? f0 : f1;
            sb = (a - f0).norm() <= tol ? f1 : f0;
          }
          if (lex_less(sb, sa)) std::swap(sa, sb);
          ie.segment = {sa, sb};
          d.interfaces.push_back(ie);
        }
    }

  for (int i = 0; i < N; ++i) {
    const Polygon& P = d.subdomains[i];
    for (std::size_t e = 0; e < P.size(); ++e) {
      auto iv = covered[i][e];
      std::sort(iv.begin(), iv.end());
      double t = 0;
      const Vec2 &e0 = P[e], &e1 = P[(e + 1) % P.size()];
      double L = (e1 - e0).norm();
      for (const auto& [lo, hi] : iv) {
        if ((lo - t) * L > tol) d.outer_boundary.push_back({e0 + t * (e1 - e0), e0 + lo * (e1 - e0)});
        t = std::max(t, hi);
      }
      if ((1 - t) * L > tol) d.outer_boundary.push_back({e0 + t * (e1 - e0), e1});
    }
  }

  // The outer boundary must be one closed loop; more loops mean a gap or hole.
  std::vector<Vec2> pts;
  auto id_of = [&](const Vec2& x) {
    for (std::size_t k = 0; k < pts.size(); ++k)
      if ((pts[k] - x).norm() <= 10 * tol) return static_cast<int>(k);
    pts.push_back(x);
    return static_cast<int>(pts.size()) - 1;
  };
  std::vector<std::pair<int, int>> links;
  for (const auto& s : d.outer_boundary) links.emplace_back(id_of(s.a), id_of(s.b));
  std::vector<int> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (auto [u, v] : links) parent[find(u)] = find(v);
  std::map<int, int> roots;
  for (std::size_t k = 0; k < pts.size(); ++k) roots[find(static_cast<int>(k))]++;
  if (roots.size() != 1) throw MeshError("decomposition: gap between sub-domains (boundary has several loops)");
  return d;
}

Preset parse_preset(const std::string& s) {
  if (s == "exp1" || s == "exp1-conforming-4") return Preset::Exp1;
  if (s == "exp2") return Preset::Exp2;
  if (s == "exp3") return Preset::Exp3;
  if (s == "exp4" || s == "exp4-nonconforming-3") return Preset::Exp4;
  if (s == "custom") return Preset::Custom;
  throw MeshError("unknown preset '" + s + "'");
}

const char* to_string(Preset p) {
  switch (p) {
    case Preset::Exp1: return "exp1";
    case Preset::Exp2: return "exp2";
    case Preset::Exp3: return "exp3";
    case Preset::Exp4: return "exp4";
    case Preset::Custom: return "custom";
  }
  return "unknown";
}

std::array<int, 2> SlideSchedule::slides(int subdomain, int step) const {
  const auto& a = initial.at(subdomain);
  const auto& b = increment.at(subdomain);
  return {a[0] + (step - 1) * b[0], a[1] + (step - 1) * b[1]};
}

SlideSchedule default_schedule(Preset p) {
  SlideSchedule s;
  switch (p) {
    case Preset::Exp1:
      s.initial = {{2, 2}, {2, 2}, {2, 2}, {2, 2}};
      s.increment = {{1, 1}, {1, 1}, {1, 1}, {1, 1}};
      break;
    case Preset::Exp2:
      s.initial = {{2, 2}, {3, 3}, {4, 4}, {5, 5}};
      s.increment = {{1, 1}, {1, 1}, {1, 1}, {1, 1}};
      break;
    case Preset::Exp3:
      s.initial = {{2, 2}, {2, 2}, {2, 2}, {2, 2}};
      s.increment = {{2, 2}, {3, 3}, {4, 4}, {5, 5}};
      break;
    case Preset::Exp4:
      s.initial = {{4, 4}, {3, 3}, {2, 2}};
      s.increment = {{3, 3}, {2, 2}, {1, 1}};
      break;
    case Preset::Custom:
      break;
  }
  return s;
}

namespace {

std::vector<Polygon> quadrants() {
  auto rect = [](double x0, double y0, double x1, double y1) {
    return Polygon{Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
  };
  return {rect(0, 0, 0.5, 0.5), rect(0.5, 0, 1, 0.5), rect(0.5, 0.5, 1, 1), rect(0, 0.5, 0.5, 1)};
}

// Trace elements sub-domain i puts on a shared axis-parallel segment.
int trace_count(const Polygon& P, const std::array<int, 2>& n, const Segment& s) {
  Vec2 lo = P[0], hi = P[0];
  for (const auto& v : P) lo = lo.cwiseMin(v), hi = hi.cwiseMax(v);
  bool vertical = std::abs(s.a(0) - s.b(0)) < 1e-14;
  double frac = vertical ? s.length() / (hi(1) - lo(1)) : s.length() / (hi(0) - lo(0));
  return static_cast<int>(std::lround(frac * (vertical ? n[1] : n[0])));
}

}  // namespace

Decomposition build_decomposition(Preset p, const SlideSchedule& schedule) {
  if (p == Preset::Custom) throw MeshError("custom decompositions are loaded from a file");
  if (p == Preset::Exp4) {
    auto rect = [](double x0, double y0, double x1, double y1) {
      return Polygon{Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
    };
    return make_decomposition("exp4", {rect(0, -0.5, 0.5, 0), rect(0, 0, 0.5, 0.5), rect(-0.5, -0.5, 0, 0.5)},
                              {{0, 1, 1}});
  }
  auto polys = quadrants();
  Decomposition probe = make_decomposition(to_string(p), polys);
  if (schedule.size() != 4) throw MeshError("quadrant presets need a schedule for 4 sub-domains");
  std::vector<LagOverride> ov;
  for (const auto& e : probe.interfaces) {
    int i = std::min(e.lag, e.mor), j = std::max(e.lag, e.mor);
    int lag = i;
    for (int step : {1, 2}) {
      int ni = trace_count(polys[i], schedule.slides(i, step), e.segment);
      int nj = trace_count(polys[j], schedule.slides(j, step), e.segment);
      if (ni != nj) {
        lag = ni > nj ? i : j;
        break;
      }
    }
    ov.push_back({i, j, lag});
  }
  return make_decomposition(to_string(p), polys, ov);
}

Decomposition build_decomposition(Preset p) { return build_decomposition(p, default_schedule(p)); }

Decomposition parse_decomposition(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::vector<Polygon> polys;
  std::vector<LagOverride> ov;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "subdomain") {
      Polygon p;
      double x, y;
      while (ls >> x >> y) p.emplace_back(x, y);
      if (!ls.eof()) throw MeshError("decomposition file line " + std::to_string(lineno) + ": bad coordinate list");
      polys.push_back(p);
    } else if (kw == "interface") {
      int a, b, lag;
      std::string word;
      if (!(ls >> a >> b >> word >> lag) || word != "lag")
        throw MeshError("decomposition file line " + std::to_string(lineno) + ": expected 'interface i j lag k'");
      if (lag != a && lag != b)
        throw MeshError("decomposition file line " + std::to_string(lineno) + ": lag must be one of the pair");
      ov.push_back({a - 1, b - 1, lag - 1});
    } else {
      throw MeshError("decomposition file line " + std::to_string(lineno) + ": unknown keyword '" + kw + "'");
    }
  }
  return make_decomposition(name, polys, ov);
}

Decomposition load_decomposition(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MeshError("cannot read decomposition file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_decomposition(ss.str(), path);
}

double SubdomainMesh::min_diameter() const {
  double d = elements.empty() ? 0 : elements[0].diameter();
  for (const auto& e : elements) d = std::min(d, e.diameter());
  return d;
}

double SubdomainMesh::max_diameter() const {
  double d = 0;
  for (const auto& e : elements) d = std::max(d, e.diameter());
  return d;
}

SubdomainMesh build_subdomain_mesh(const Decomposition& d, int i, int n) { return build_subdomain_mesh(d, i, n, n); }

SubdomainMesh build_subdomain_mesh(const Decomposition& d, int i, int nx, int ny) {
  if (nx < 1 || ny < 1) throw MeshError("build_subdomain_mesh: slide counts must be >= 1");
  SubdomainMesh m;
  m.subdomain = i;
  m.polygon = d.subdomains.at(i);
  m.slides = {nx, ny};
  const Polygon& P = m.polygon;
  auto lerp = [](double a, double b, int k, int n) { return k == 0 ? a : (k == n ? b : a + (b - a) * k / n); };
  if (P.size() == 4) {
    Vec2 lo = P[0], hi = P[0];
    for (const auto& v : P) lo = lo.cwiseMin(v), hi = hi.cwiseMax(v);
    for (int jy = 0; jy <= ny; ++jy)
      for (int ix = 0; ix <= nx; ++ix) m.nodes.emplace_back(lerp(lo(0), hi(0), ix, nx), lerp(lo(1), hi(1), jy, ny));
    auto id = [&](int ix, int jy) { return jy * (nx + 1) + ix; };
    for (int jy = 0; jy < ny; ++jy)
      for (int ix = 0; ix < nx; ++ix) {
        std::vector<int> en = {id(ix, jy), id(ix + 1, jy), id(ix + 1, jy + 1), id(ix, jy + 1)};
        m.elements.push_back(Panel::rectangle(m.nodes[en[0]], m.nodes[en[2]]));
        m.element_nodes.push_back(en);
      }
  } else {
    const int n = nx;
    const Vec2 &A = P[0], &B = P[1], &C = P[2];
    std::map<std::pair<int, int>, int> idx;
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k + j <= n; ++k) {
        Vec2 x = A + (B - A) * (static_cast<double>(k) / n) + (C - A) * (static_cast<double>(j) / n);
        if (k == n) x = B;
        if (j == n) x = C;
        idx[{k, j}] = static_cast<int>(m.nodes.size());
        m.nodes.push_back(x);
      }
    for (int j = 0; j < n; ++j)
      for (int k = 0; k + j < n; ++k) {
        std::vector<int> up = {idx[{k, j}], idx[{k + 1, j}], idx[{k, j + 1}]};
        m.elements.push_back(Panel::triangle(m.nodes[up[0]], m.nodes[up[1]], m.nodes[up[2]]));
        m.element_nodes.push_back(up);
        if (k + j + 1 < n) {
          std::vector<int> dn = {idx[{k + 1, j}], idx[{k + 1, j + 1}], idx[{k, j + 1}]};
          m.elements.push_back(Panel::triangle(m.nodes[dn[0]], m.nodes[dn[1]], m.nodes[dn[2]]));
          m.element_nodes.push_back(dn);
        }
      }
    m.slides = {n, n};
  }
  for (const auto& e : m.elements) m.h = std::max(m.h, e.longest_edge());
  return m;
}

TracePartition extract_trace_partition(const SubdomainMesh& mesh, const InterfaceEdge& edge) {
  const double tol = kRelTol * std::max(edge.length(), mesh.h);
  const Polygon& P = mesh.polygon;
  bool on_boundary = false;
  for (std::size_t e = 0; e < P.size(); ++e) {
    const Vec2 &a = P[e], &b = P[(e + 1) % P.size()];
    if (point_on_segment(edge.segment.a, a, b, tol) && point_on_segment(edge.segment.b, a, b, tol))
      on_boundary = true;
  }
  if (!on_boundary)
    throw MeshError("interface " + std::to_string(edge.id + 1) + " is not on the boundary of sub-domain " +
                    std::to_string(mesh.subdomain + 1));
  TracePartition t;
  t.edge = edge.id;
  t.subdomain = mesh.subdomain;
  std::vector<std::pair<double, int>> pts;
  for (std::size_t k = 0; k < mesh.nodes.size(); ++k)
    if (edge.contains(mesh.nodes[k], tol)) pts.emplace_back(edge.coordinate(mesh.nodes[k]), static_cast<int>(k));
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 2 || std::abs(pts.front().first) > tol || std::abs(pts.back().first - edge.length()) > tol)
    throw MeshError("interface " + std::to_string(edge.id + 1) + " endpoints are not nodes of sub-domain " +
                    std::to_string(mesh.subdomain + 1));
  pts.front().first = 0.0;
  pts.back().first = edge.length();
  for (const auto& [s, k] : pts) {
    t.breakpoints.push_back(s);
    t.nodes.push_back(k);
  }
  return t;
}

Grouping parse_grouping(const std::string& s) {
  if (s == "pairs") return Grouping::Pairs;
  if (s == "whole") return Grouping::Whole;
  if (s == "identity") return Grouping::Identity;
  throw MeshError("unknown grouping '" + s + "' (expected pairs, whole or identity)");
}

const char* to_string(Grouping g) {
  switch (g) {
    case Grouping::Pairs: return "pairs";
    case Grouping::Whole: return "whole";
    case Grouping::Identity: return "identity";
  }
  return "unknown";
}

double MultiplierPartition::width() const {
  double w = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) w = std::max(w, breakpoints[i + 1] - breakpoints[i]);
  return w;
}

MultiplierPartition build_multiplier_partition(const TracePartition& trace, Grouping g) {
  const int m = trace.elements();
  if (m < 2 && g != Grouping::Identity)
    throw MeshError("interface " + std::to_string(trace.edge + 1) + ": trace with " + std::to_string(m) +
                    " element(s) cannot be coarsened");
  MultiplierPartition mp;
  mp.edge = trace.edge;
  std::vector<int> cuts = {0};
  switch (g) {
    case Grouping::Pairs:
      for (int k = 2; k + 2 <= m; k += 2) cuts.push_back(k);
      break;
    case Grouping::Whole:
      break;
    case Grouping::Identity:
      for (int k = 1; k < m; ++k) cuts.push_back(k);
      break;
  }
  cuts.push_back(m);
  for (std::size_t i = 0; i < cuts.size(); ++i) mp.breakpoints.push_back(trace.breakpoints[cuts[i]]);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) mp.trace_range.push_back({cuts[i], cuts[i + 1]});
  if (g != Grouping::Identity) {
    std::string why;
    if (!satisfies_A2(trace, mp, &why)) throw MeshError("interface " + std::to_string(trace.edge + 1) + ": " + why);
  }
  return mp;
}

bool satisfies_A2(const TracePartition& trace, const MultiplierPartition& m, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = "(A2) violated: " + s;
    return false;
  };
  const double tol = 1e-12 * (trace.breakpoints.back() - trace.breakpoints.front());
  if (m.elements() < 1) return fail("empty multiplier mesh");
  if (std::abs(m.breakpoints.front() - trace.breakpoints.front()) > tol ||
      std::abs(m.breakpoints.back() - trace.breakpoints.back()) > tol)
    return fail("multiplier mesh does not span the edge");
  std::size_t k = 0;
  for (int e = 0; e < m.elements(); ++e) {
    double a = m.breakpoints[e], b = m.breakpoints[e + 1];
    while (k < trace.breakpoints.size() && trace.breakpoints[k] < a - tol) ++k;
    if (k == trace.breakpoints.size() || std::abs(trace.breakpoints[k] - a) > tol)
      return fail("multiplier breakpoint is not a trace node");
    std::size_t first = k;
    while (k < trace.breakpoints.size() && trace.breakpoints[k] < b - tol) ++k;
    if (k == trace.breakpoints.size() || std::abs(trace.breakpoints[k] - b) > tol)
      return fail("multiplier breakpoint is not a trace node");
    if (k - first < 2)
      return fail("multiplier element " + std::to_string(e + 1) + " has no interior trace node");
  }
  return true;
}

ValidationReport validate_decomposition(const Decomposition& d, const std::vector<SubdomainMesh>& meshes,
                                        const std::vector<MultiplierPartition>& multipliers, double quasi_bound) {
  ValidationReport r;
  const double tol = kRelTol * extent(d.subdomains);
  for (const auto& e : d.interfaces) {
    const Polygon& L = d.subdomains[e.lag];
    bool whole = false;
    for (std::size_t k = 0; k < L.size(); ++k) {
      const Vec2 &a = L[k], &b = L[(k + 1) % L.size()];
      if (((a - e.segment.a).norm() <= tol && (b - e.segment.b).norm() <= tol) ||
          ((a - e.segment.b).norm() <= tol && (b - e.segment.a).norm() <= tol))
        whole = true;
    }
    if (!whole) {
      r.a1 = false;
      r.issues.push_back("interface " + std::to_string(e.id + 1) + " is not an entire edge of its lag side");
    }
  }
  for (const auto& m : meshes) {
    double area = 0;
    for (const auto& el : m.elements) area += el.area();
    double target = polygon_area(m.polygon);
    if (std::abs(area - target) > 1e-12 * target) {
      r.tiling = false;
      r.issues.push_back("sub-domain " + std::to_string(m.subdomain + 1) + " is not tiled by its elements");
    }
    r.h.push_back(m.h);
    r.quasi_ratio.push_back(m.quasi_uniformity());
    if (m.quasi_uniformity() > quasi_bound) {
      r.quasi_uniform = false;
      r.issues.push_back("sub-domain " + std::to_string(m.subdomain + 1) + " exceeds the quasi-uniformity bound");
    }
  }
  for (const auto& mp : multipliers) {
    const auto& e = d.interfaces.at(mp.edge);
    const SubdomainMesh* lag = nullptr;
    for (const auto& m : meshes)
      if (m.subdomain == e.lag) lag = &m;
    if (!lag) {
      r.a2 = false;
      r.issues.push_back("interface " + std::to_string(e.id + 1) + ": lag mesh missing");
      continue;
    }
    std::string why;
    if (!satisfies_A2(extract_trace_partition(*lag, e), mp, &why)) {
      r.a2 = false;
      r.issues.push_back("interface " + std::to_string(e.id + 1) + ": " + why);
    }
    r.k.push_back(mp.width());
  }
  if (!r.h.empty()) {
    r.h_max = *std::max_element(r.h.begin(), r.h.end());
    r.h_min = *std::min_element(r.h.begin(), r.h.end());
  }
  if (!r.k.empty()) r.k_max = *std::max_element(r.k.begin(), r.k.end());
  if (r.h_max >= 1.0) r.issues.push_back("mesh width h >= 1");
  return r;
}

}  // namespace mortar
