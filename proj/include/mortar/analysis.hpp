#pragma once

#include "mortar/solver.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mortar {

struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ||[u]||_{L2(gamma)}, exact.
double jump_l2_norm(const XSpace& X, const Eigen::VectorXd& u);

struct ExtrapolationResult {
  double energy = 0;  // ||u||^2_ex
  double C = 0;
  double rate = 0;    // p in E(h) = E_ex - C h^p
  double residual = 0;
  std::vector<double> h;
  std::vector<double> energies;
};

// Least-squares fit of E(h) = E_ex - C h^p over (E_ex, C, p). Energies must
// increase as h decreases.
ExtrapolationResult extrapolate_energy(const std::vector<double>& energies, const std::vector<double>& h);

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct ErrorRecord {
  int step = 0;
  double h = 0, k = 0, h_min = 0;
  int dim_x = 0, dim_m = 0;
  double F_uh = 0;
  double jump_l2 = 0;
  double curve1 = 0, curve2 = 0, curve3 = 0;
  double curve4 = kNoValue;  // NaN without a conforming baseline
};

// curve1 = (|E - F(u_h)| + ||[u_h]||)^{1/2} / ||u||_ex and its two parts;
// curve4 = |E - F(u~_h)|^{1/2} / ||u||_ex, from `conforming_energy` if finite.
ErrorRecord error_curves(double F_uh, double jump_l2, double energy_ex, double conforming_energy = kNoValue);

enum class Curve { C1, C2, C3, C4 };
Curve parse_curve(const std::string& s);
double curve_value(const ErrorRecord& r, Curve c);

// Least-squares slope of log(curve) against log(1/h) over records
// [first, last); non-positive or missing values are skipped.
double fit_slope(const std::vector<ErrorRecord>& records, Curve c, int first = 0, int last = -1);
double fit_slope(const std::vector<double>& h, const std::vector<double>& values);

struct StabilityValue {
  double value = 0;
  double residual = 0;
};

// beta_h: smallest singular value of M^{-1/2} B G^{-1/2}, M = diag(|J|).
// +inf when there are no multipliers.
StabilityValue infsup_constant(const Eigen::MatrixXd& G, const Eigen::MatrixXd& B, const Eigen::VectorXd& lengths);

// alpha_h: smallest eigenvalue of the pencil (Z^T A Z, Z^T G Z).
StabilityValue ellipticity_constant(const Eigen::MatrixXd& A, const Eigen::MatrixXd& G, const Eigen::MatrixXd& Z);

struct PoincareReport {
  double max_sampled = 0;  // max over samples of ||v||^2 / (2 |v|^2_{H1(T)})
  double supremum = 0;     // sup over V_h, from the pencil
  int samples = 0;
};

PoincareReport poincare_check(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness, const Eigen::MatrixXd& Z,
                              int samples = 100, std::uint64_t seed = 1);
// Ratio for one vector; 0 for v = 0.
double poincare_ratio(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness, const Eigen::VectorXd& v);

}  // namespace mortar
