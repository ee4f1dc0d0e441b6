#include "mortar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mortar {

double jump_l2_norm(const XSpace& X, const Eigen::VectorXd& u) {
  double s = 0;
  for (std::size_t l = 0; l < X.decomposition().interfaces.size(); ++l)
    s += jump(X, u, static_cast<int>(l)).squared_integral();
  return std::sqrt(s);
}

namespace {

struct LinearFit {
  double E = 0, C = 0, residual = 0;
};

// E(h) = E_ex - C h^p for fixed p.
LinearFit fit_fixed_rate(const std::vector<double>& E, const std::vector<double>& h, double p) {
  const int n = static_cast<int>(E.size());
  Eigen::MatrixXd M(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    M(i, 0) = 1.0;
    M(i, 1) = -std::pow(h[i], p);
    y(i) = E[i];
  }
  Eigen::Vector2d c = M.colPivHouseholderQr().solve(y);
  return {c(0), c(1), (M * c - y).squaredNorm()};
}

}  // namespace

ExtrapolationResult extrapolate_energy(const std::vector<double>& energies, const std::vector<double>& h) {
  if (energies.size() != h.size() || energies.size() < 3)
    throw AnalysisError("extrapolate_energy: need at least 3 levels with matching mesh widths");
  std::vector<int> order(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return h[a] > h[b]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (!(energies[order[i]] > energies[order[i - 1]]))
      throw AnalysisError("extrapolate_energy: energies are not increasing under refinement");

  auto objective = [&](double p) { return fit_fixed_rate(energies, h, p).residual; };
  // Coarse scan then golden-section refinement in p.
  double best = 0.05, best_val = objective(best);
  for (double p = 0.05; p <= 4.0 + 1e-12; p += 0.05) {
    double v = objective(p);
    if (v < best_val) best = p, best_val = v;
  }
  double a = std::max(0.01, best - 0.05), b = best + 0.05;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = objective(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = objective(d);
    }
  }
  double p = 0.5 * (a + b);
  LinearFit fit = fit_fixed_rate(energies, h, p);
  ExtrapolationResult r;
  r.energy = fit.E;
  r.C = fit.C;
  r.rate = p;
  r.residual = std::sqrt(fit.residual);
  r.h = h;
  r.energies = energies;
  return r;
}

ErrorRecord error_curves(double F_uh, double jump_l2, double energy_ex, double conforming_energy) {
  if (!(energy_ex > 0)) throw AnalysisError("error_curves: extrapolated energy is missing");
  ErrorRecord r;
  r.F_uh = F_uh;
  r.jump_l2 = jump_l2;
  const double norm = std::sqrt(energy_ex);
  const double gap = std::abs(energy_ex - F_uh);
  r.curve1 = std::sqrt(gap + jump_l2) / norm;
  r.curve2 = std::sqrt(gap) / norm;
  r.curve3 = std::sqrt(jump_l2) / norm;
  if (std::isfinite(conforming_energy)) r.curve4 = std::sqrt(std::abs(energy_ex - conforming_energy)) / norm;
  return r;
}

Curve parse_curve(const std::string& s) {
  if (s == "curve1") return Curve::C1;
  if (s == "curve2") return Curve::C2;
  if (s == "curve3") return Curve::C3;
  if (s == "curve4") return Curve::C4;
  throw AnalysisError("unknown curve '" + s + "'");
}

double curve_value(const ErrorRecord& r, Curve c) {
  switch (c) {
    case Curve::C1: return r.curve1;
    case Curve::C2: return r.curve2;
    case Curve::C3: return r.curve3;
    case Curve::C4: return r.curve4;
  }
  return kNoValue;
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& values) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < h.size() && i < values.size(); ++i)
    if (std::isfinite(values[i]) && values[i] > 0 && h[i] > 0) {
      x.push_back(std::log(1.0 / h[i]));
      y.push_back(std::log(values[i]));
    }
  if (x.size() < 3) throw AnalysisError("fit_slope: fewer than 3 usable points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw AnalysisError("fit_slope: all mesh widths are equal");
  return sxy / sxx;
}

double fit_slope(const std::vector<ErrorRecord>& records, Curve c, int first, int last) {
  if (last < 0 || last > static_cast<int>(records.size())) last = static_cast<int>(records.size());
  std::vector<double> h, v;
  for (int i = std::max(0, first); i < last; ++i) {
    h.push_back(records[i].h);
    v.push_back(curve_value(records[i], c));
  }
  return fit_slope(h, v);
}

StabilityValue infsup_constant(const Eigen::MatrixXd& G, const Eigen::MatrixXd& B, const Eigen::VectorXd& lengths) {
  if (B.rows() == 0) return {std::numeric_limits<double>::infinity(), 0.0};
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw AnalysisError("infsup_constant: Gram matrix is not positive definite");
  Eigen::MatrixXd Y = llt.matrixL().solve(B.transpose());
  Eigen::VectorXd s = lengths.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd H = s.asDiagonal() * (Y.transpose() * Y) * s.asDiagonal();
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  double lam = es.eigenvalues()(0);
  Eigen::VectorXd v = es.eigenvectors().col(0);
  double res = (H * v - lam * v).norm();
  return {std::sqrt(std::max(lam, 0.0)), res};
}

StabilityValue ellipticity_constant(const Eigen::MatrixXd& A, const Eigen::MatrixXd& G, const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd Az = Z.transpose() * A * Z, Gz = Z.transpose() * G * Z;
  Az = 0.5 * (Az + Az.transpose()).eval();
  Gz = 0.5 * (Gz + Gz.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Az, Gz);
  if (es.info() != Eigen::Success) throw AnalysisError("ellipticity_constant: Gram matrix is not positive definite");
  double lam = es.eigenvalues()(0);
  Eigen::VectorXd v = es.eigenvectors().col(0);
  double res = (Az * v - lam * Gz * v).norm() / std::max(1e-300, (Gz * v).norm());
  return {lam, res};
}

double poincare_ratio(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness, const Eigen::VectorXd& v) {
  double num = v.dot(mass * v);
  if (num == 0) return 0.0;
  double den = 2.0 * v.dot(stiffness * v);
  return den > 0 ? num / den : std::numeric_limits<double>::infinity();
}

PoincareReport poincare_check(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness, const Eigen::MatrixXd& Z,
                              int samples, std::uint64_t seed) {
  PoincareReport r;
  r.samples = samples;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(Z.cols());
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
    r.max_sampled = std::max(r.max_sampled, poincare_ratio(mass, stiffness, Z * c));
  }
  if (Z.cols() == 0) return r;
  Eigen::MatrixXd Kz = 2.0 * Z.transpose() * stiffness * Z, Mz = Z.transpose() * mass * Z;
  Kz = 0.5 * (Kz + Kz.transpose()).eval();
  Mz = 0.5 * (Mz + Mz.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kz, Mz, Eigen::EigenvaluesOnly);
  double lam = es.eigenvalues()(0);
  r.supremum = lam > 0 ? 1.0 / lam : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace mortar
