#include "mortar/assembly.hpp"

#include "mortar/kernel.hpp"
#include "mortar/quadrature.hpp"
#include "mortar/shape.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mortar {

namespace {

using Block = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

struct Elem {
  int sub = 0;
  int index = 0;
  const Panel* P = nullptr;
  int nv = 0;
  std::array<int, 4> dof{-1, -1, -1, -1};
  std::array<int, 4> node{-1, -1, -1, -1};
  int ix = 0, iy = 0;  // grid position on rectangle sub-domains
  bool active = false;
};

struct Grid {
  bool uniform = false;
  int nx = 0, ny = 0;
};

std::vector<Elem> element_table(const XSpace& X, std::vector<Grid>& grids) {
  std::vector<Elem> out;
  grids.clear();
  for (int i = 0; i < X.decomposition().size(); ++i) {
    const SubdomainMesh& m = X.mesh(i);
    Grid g;
    g.uniform = X.decomposition().shape(i) == Shape::Rectangle;
    g.nx = m.slides[0];
    g.ny = m.slides[1];
    grids.push_back(g);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
      Elem el;
      el.sub = i;
      el.index = static_cast<int>(e);
      el.P = &m.elements[e];
      el.nv = static_cast<int>(m.element_nodes[e].size());
      for (int a = 0; a < el.nv; ++a) {
        el.node[a] = m.element_nodes[e][a];
        el.dof[a] = X.dof(i, el.node[a]);
        el.active = el.active || el.dof[a] >= 0;
      }
      if (g.uniform) {
        el.ix = static_cast<int>(e) % g.nx;
        el.iy = static_cast<int>(e) / g.nx;
      }
      out.push_back(el);
    }
  }
  return out;
}

double separation_ratio(const Panel& P, const Panel& Q) {
  double gap;
  if (P.is_rect() && Q.is_rect()) {
    Vec2 d = (P.lo() - Q.hi()).cwiseMax(Q.lo() - P.hi()).cwiseMax(0.0);
    gap = d.norm();
  } else {
    gap = polygon_distance(P.v, Q.v);
  }
  return gap / std::max(P.diameter(), Q.diameter());
}

// Gauss points and weighted gradients per element, for each far-field order.
struct FarData {
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> x;
  std::vector<Eigen::MatrixXd> g;  // row k: w_k d_comp phi_a, column comp * nv + a
};

FarData far_data(const Panel& P, int max_order) {
  FarData d;
  d.x.resize(max_order + 1);
  d.g.resize(max_order + 1);
  auto grads = shape_gradients(P);
  const int cols = static_cast<int>(grads.size());
  for (int n = 2; n <= max_order; ++n) {
    Eigen::VectorXd w;
    detail::panel_points(P, n, d.x[n], w);
    d.g[n].resize(d.x[n].rows(), cols);
    for (int k = 0; k < d.x[n].rows(); ++k)
      for (int c = 0; c < cols; ++c) d.g[n](k, c) = w(k) * grads[c](d.x[n](k, 0), d.x[n](k, 1));
  }
  return d;
}

Block far_block(const FarData& a, const FarData& b, int nva, int nvb, int n) {
  const auto& xa = a.x[n];
  const auto& xb = b.x[n];
  Eigen::MatrixXd K(xa.rows(), xb.rows());
  for (int j = 0; j < xb.rows(); ++j)
    for (int i = 0; i < xa.rows(); ++i) {
      double dx = xa(i, 0) - xb(j, 0), dy = xa(i, 1) - xb(j, 1);
      K(i, j) = 1.0 / std::sqrt(dx * dx + dy * dy);
    }
  Eigen::MatrixXd F = a.g[n].transpose() * K * b.g[n];
  Block M = F.topLeftCorner(nva, nvb) + F.block(nva, nvb, nva, nvb);
  return kInv4Pi * M;
}

Block near_block(const Panel& P, const Panel& Q, double accuracy) {
  if (P.is_rect() && Q.is_rect()) return bilinear_grad_pair(P, Q, accuracy);
  auto gp = shape_gradients(P), gq = shape_gradients(Q);
  const int na = static_cast<int>(gp.size()) / 2, nb = static_cast<int>(gq.size()) / 2;
  Eigen::MatrixXd F = single_layer_pair_matrix(P, Q, gp, gq, accuracy);
  return F.topLeftCorner(na, nb) + F.block(na, nb, na, nb);
}

struct GradPairEngine {
  const std::vector<Elem>& elems;
  const std::vector<FarData>& far;
  double accuracy;
  int max_order;

  Block operator()(int i, int j, bool* was_far) const {
    const Elem &a = elems[i], &b = elems[j];
    double ratio = i == j ? 0.0 : separation_ratio(*a.P, *b.P);
    if (ratio >= kFarRatio) {
      *was_far = true;
      int n = std::min(far_field_order(ratio, accuracy), max_order);
      return far_block(far[i], far[j], a.nv, b.nv, n);
    }
    *was_far = false;
    return near_block(*a.P, *b.P, accuracy);
  }
};

void scatter(Eigen::MatrixXd& A, const Elem& a, const Elem& b, const Block& M, bool mirror) {
  for (int p = 0; p < a.nv; ++p) {
    if (a.dof[p] < 0) continue;
    for (int q = 0; q < b.nv; ++q) {
      if (b.dof[q] < 0) continue;
      A(a.dof[p], b.dof[q]) += M(p, q);
      if (mirror) A(b.dof[q], a.dof[p]) += M(p, q);
    }
  }
}

}  // namespace

Eigen::MatrixXd assemble_A(const XSpace& X, const AssemblyOptions& opt, AssemblyStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<Grid> grids;
  std::vector<Elem> all = element_table(X, grids);
  std::vector<Elem> elems;
  for (const auto& e : all)
    if (e.active) elems.push_back(e);
  const int ne = static_cast<int>(elems.size());
  const int max_order = far_field_order(kFarRatio, opt.accuracy);
  std::vector<FarData> far(ne);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < ne; ++i) far[i] = far_data(*elems[i].P, max_order);
  GradPairEngine engine{elems, far, opt.accuracy, max_order};
  AssemblyStats st;

  // Same-sub-domain pairs on uniform grids depend only on the grid offset;
  // each offset is evaluated once on a canonical representative.
  const int nsub = X.decomposition().size();
  std::vector<std::vector<Block>> table(nsub);
  long table_entries = 0;
  for (int s = 0; s < nsub; ++s) {
    if (!grids[s].uniform) continue;
    const int nx = grids[s].nx, ny = grids[s].ny;
    const SubdomainMesh& m = X.mesh(s);
    table[s].resize((2 * nx - 1) * ny);
    std::vector<std::array<int, 2>> offsets;
    for (int dy = 0; dy < ny; ++dy)
      for (int dx = -(nx - 1); dx < nx; ++dx)
        if (dy > 0 || dx >= 0) offsets.push_back({dx, dy});
    std::vector<char> far_flag(offsets.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      auto [dx, dy] = offsets[k];
      int ax = std::max(0, -dx), bx = ax + dx;
      const Panel& P = m.elements[ax];
      const Panel& Q = m.elements[dy * nx + bx];
      double ratio = (dx == 0 && dy == 0) ? 0.0 : separation_ratio(P, Q);
      Block M;
      if (ratio >= kFarRatio) {
        int n = std::min(far_field_order(ratio, opt.accuracy), max_order);
        FarData fa = far_data(P, n), fb = far_data(Q, n);
        M = far_block(fa, fb, 4, 4, n);
        far_flag[k] = 1;
      } else {
        M = near_block(P, Q, opt.accuracy);
      }
      table[s][dy * (2 * nx - 1) + (dx + nx - 1)] = M;
    }
    for (char f : far_flag) (f ? st.far : st.near)++;
    table_entries += static_cast<long>(offsets.size());
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(X.dim(), X.dim());
  const int batch = 32;
  std::vector<std::vector<Block>> blocks(batch);
  std::vector<std::vector<char>> flags(batch);
  for (int i0 = 0; i0 < ne; i0 += batch) {
    const int i1 = std::min(ne, i0 + batch);
#pragma omp parallel for schedule(dynamic)
    for (int i = i0; i < i1; ++i) {
      auto& bl = blocks[i - i0];
      auto& fl = flags[i - i0];
      bl.clear();
      fl.clear();
      for (int j = i; j < ne; ++j) {
        if (elems[i].sub == elems[j].sub && grids[elems[i].sub].uniform) continue;
        bool was_far = false;
        bl.push_back(engine(i, j, &was_far));
        fl.push_back(was_far);
      }
    }
    for (int i = i0; i < i1; ++i) {
      std::size_t next = 0;
      for (int j = i; j < ne; ++j) {
        const Elem &a = elems[i], &b = elems[j];
        ++st.pairs;
        if (a.sub == b.sub && grids[a.sub].uniform) {
          const int nx = grids[a.sub].nx;
          int dx = b.ix - a.ix, dy = b.iy - a.iy;
          const Block& M = table[a.sub][dy * (2 * nx - 1) + (dx + nx - 1)];
          scatter(A, a, b, M, i != j);
          ++st.reused;
        } else {
          (flags[i - i0][next] ? st.far : st.near)++;
          scatter(A, a, b, blocks[i - i0][next++], i != j);
        }
      }
    }
  }
  st.reused = std::max(0L, st.reused - table_entries);
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = st;
  return A;
}

Eigen::MatrixXd assemble_B(const XSpace& X, const MSpace& M) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M.dim(), X.dim());
  for (std::size_t l = 0; l < M.partitions.size(); ++l) {
    const int e = static_cast<int>(l);
    const TraceMap& lag = X.trace_map(e, Side::Lag);
    const TraceMap& mor = X.trace_map(e, Side::Mor);
    std::vector<double> s = merged_breakpoints(X, e, &M);
    const auto& mb = M.partitions[l].breakpoints;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      double a = s[k], b = s[k + 1], mid = 0.5 * (a + b);
      int J = static_cast<int>(std::upper_bound(mb.begin(), mb.end(), mid) - mb.begin()) - 1;
      J = std::clamp(J, 0, static_cast<int>(mb.size()) - 2);
      const int row = M.offset(e) + J;
      const double w = 0.5 * (b - a);
      for (double t : {a, b}) {
        for (const auto& [dof, c] : lag.at(t)) B(row, dof) += w * c;
        for (const auto& [dof, c] : mor.at(t)) B(row, dof) -= w * c;
      }
    }
  }
  return B;
}

Eigen::VectorXd assemble_F(const XSpace& X, double f) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(X.dim());
  for (int i = 0; i < X.decomposition().size(); ++i) {
    const SubdomainMesh& m = X.mesh(i);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
      const auto& en = m.element_nodes[e];
      double share = f * m.elements[e].area() / static_cast<double>(en.size());
      for (int n : en)
        if (X.dof(i, n) >= 0) F(X.dof(i, n)) += share;
    }
  }
  return F;
}

Eigen::VectorXd assemble_F(const XSpace& X, const std::function<double(const Vec2&)>& f) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(X.dim());
  for (int i = 0; i < X.decomposition().size(); ++i) {
    const SubdomainMesh& m = X.mesh(i);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
      auto shapes = shape_functions(m.elements[e]);
      Eigen::Matrix<double, Eigen::Dynamic, 2> x;
      Eigen::VectorXd w;
      detail::panel_points(m.elements[e], 5, x, w);
      const auto& en = m.element_nodes[e];
      for (int k = 0; k < x.rows(); ++k) {
        Vec2 p = x.row(k).transpose();
        double fw = f(p) * w(k);
        for (std::size_t a = 0; a < en.size(); ++a)
          if (X.dof(i, en[a]) >= 0) F(X.dof(i, en[a])) += fw * shapes[a](p);
      }
    }
  }
  return F;
}

namespace {

template <typename ElementMatrix>
Eigen::MatrixXd block_diagonal(const XSpace& X, ElementMatrix&& local) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(X.dim(), X.dim());
  for (int i = 0; i < X.decomposition().size(); ++i) {
    const SubdomainMesh& m = X.mesh(i);
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
      Eigen::MatrixXd Ke = local(m.elements[e]);
      const auto& en = m.element_nodes[e];
      for (std::size_t a = 0; a < en.size(); ++a) {
        int da = X.dof(i, en[a]);
        if (da < 0) continue;
        for (std::size_t b = 0; b < en.size(); ++b) {
          int db = X.dof(i, en[b]);
          if (db >= 0) K(da, db) += Ke(a, b);
        }
      }
    }
  }
  return K;
}

}  // namespace

Eigen::MatrixXd assemble_mass(const XSpace& X) {
  return block_diagonal(X, [](const Panel& P) { return element_mass(P); });
}

Eigen::MatrixXd assemble_stiffness(const XSpace& X) {
  return block_diagonal(X, [](const Panel& P) { return element_stiffness(P); });
}

namespace {

// Local function set of a pair: P's nodes, then Q's nodes not in P.
struct PairFunctions {
  std::vector<int> node;
  std::vector<Poly2> ps, qs;
};

PairFunctions pair_functions(const SubdomainMesh& m, int ep, int eq) {
  PairFunctions f;
  auto sp = shape_functions(m.elements[ep]);
  auto sq = shape_functions(m.elements[eq]);
  const auto& np = m.element_nodes[ep];
  const auto& nq = m.element_nodes[eq];
  auto local_q = [&](int n) {
    for (std::size_t b = 0; b < nq.size(); ++b)
      if (nq[b] == n) return static_cast<int>(b);
    return -1;
  };
  for (std::size_t a = 0; a < np.size(); ++a) {
    f.node.push_back(np[a]);
    f.ps.push_back(sp[a]);
    int b = local_q(np[a]);
    f.qs.push_back(b >= 0 ? sq[b] : Poly2());
  }
  for (std::size_t b = 0; b < nq.size(); ++b) {
    if (std::find(np.begin(), np.end(), nq[b]) != np.end()) continue;
    f.node.push_back(nq[b]);
    f.ps.push_back(Poly2());
    f.qs.push_back(sq[b]);
  }
  return f;
}

}  // namespace

Eigen::MatrixXd assemble_h12_seminorm(const XSpace& X, const AssemblyOptions& opt) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(X.dim(), X.dim());
  for (int s = 0; s < X.decomposition().size(); ++s) {
    const SubdomainMesh& m = X.mesh(s);
    const int ne = static_cast<int>(m.elements.size());
    const bool uniform = X.decomposition().shape(s) == Shape::Rectangle;
    const int nx = m.slides[0], ny = m.slides[1];
    std::vector<Eigen::MatrixXd> table;
    if (uniform) {
      table.resize((2 * nx - 1) * ny);
      std::vector<std::array<int, 2>> offsets;
      for (int dy = 0; dy < ny; ++dy)
        for (int dx = -(nx - 1); dx < nx; ++dx)
          if (dy > 0 || dx >= 0) offsets.push_back({dx, dy});
#pragma omp parallel for schedule(dynamic)
      for (std::size_t k = 0; k < offsets.size(); ++k) {
        auto [dx, dy] = offsets[k];
        int ax = std::max(0, -dx);
        int ep = ax, eq = dy * nx + ax + dx;
        PairFunctions f = pair_functions(m, ep, eq);
        table[dy * (2 * nx - 1) + (dx + nx - 1)] =
            slobodeckij_pair_matrix(m.elements[ep], m.elements[eq], f.ps, f.qs, opt.slobodeckij_accuracy);
      }
    }
    for (int i = 0; i < ne; ++i)
      for (int j = i; j < ne; ++j) {
        PairFunctions f = pair_functions(m, i, j);
        Eigen::MatrixXd M;
        if (uniform) {
          int dx = j % nx - i % nx, dy = j / nx - i / nx;
          M = table[dy * (2 * nx - 1) + (dx + nx - 1)];
        } else {
          M = slobodeckij_pair_matrix(m.elements[i], m.elements[j], f.ps, f.qs, opt.slobodeckij_accuracy);
        }
        const double factor = i == j ? 1.0 : 2.0;
        for (std::size_t a = 0; a < f.node.size(); ++a) {
          int da = X.dof(s, f.node[a]);
          if (da < 0) continue;
          for (std::size_t b = 0; b < f.node.size(); ++b) {
            int db = X.dof(s, f.node[b]);
            if (db >= 0) S(da, db) += factor * M(a, b);
          }
        }
      }
  }
  return 0.5 * (S + S.transpose());
}

Eigen::MatrixXd assemble_h12_gram(const XSpace& X, const AssemblyOptions& opt) {
  return assemble_mass(X) + assemble_h12_seminorm(X, opt);
}

SaddleSystem assemble_system(const XSpace& X, const MSpace& M, const AssemblyOptions& opt, double f) {
  SaddleSystem S;
  S.A = assemble_A(X, opt, &S.stats);
  S.B = assemble_B(X, M);
  S.F = assemble_F(X, f);
  S.dim_x = X.dim();
  S.dim_m = M.dim();
  S.h_min = std::numeric_limits<double>::infinity();
  for (const auto& m : X.meshes()) {
    S.h = std::max(S.h, m.h);
    S.h_min = std::min(S.h_min, m.h);
  }
  for (const auto& p : M.partitions) S.k = std::max(S.k, p.width());
  return S;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& A) {
  char buf[64];
  os << A.rows() << ' ' << A.cols() << '\n';
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      std::snprintf(buf, sizeof buf, j ? " %.17g" : "%.17g", A(i, j));
      os << buf;
    }
    os << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  Eigen::Index r = 0, c = 0;
  if (!(is >> r >> c) || r < 0 || c < 0) throw std::runtime_error("read_matrix: bad header");
  Eigen::MatrixXd A(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (!(is >> A(i, j))) throw std::runtime_error("read_matrix: truncated data");
  return A;
}

}  // namespace mortar
