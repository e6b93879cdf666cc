#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "rankone/as_model.hpp"
#include "rankone/onedim.hpp"

namespace rankone {

/// Two-parameter family of planar maps (X, theta) -> (X', theta') with a
/// one-dimensional singular limit at b = 0. theta is lifted throughout.
struct Family2D {
  std::function<ASState(double a, double b, const ASState&)> map;
  std::function<double(double a, double X, double theta)> singular;
  /// Optional closed-form log|det DF_{a,b}|.
  std::function<double(double a, double b, const ASState&)> log_abs_det;
  /// Optional closed-form d/dX of the singular limit.
  std::function<double(double a, double X, double theta)> singular_dX;
  /// Optional circle map f_a(theta) = singular(a, 0, theta) with derivatives.
  std::function<CircleMap(double a)> circle;
  double a_lo = 0.0;
  double a_hi = kTwoPi;
  double X_lo = 0.0;
  double X_hi = 1.0;
  std::vector<double> b_values;  // decreasing, positive
  std::string name;
};

/// Closed-form adapter for the return-map model; b values are mu_n for the given n.
Family2D as_family(const ASParams& p, const std::vector<int>& n_values);

struct GridSpec {
  int a_points = 8;
  int X_points = 12;
  int theta_points = 24;
  unsigned threads = 1;
};

/// Multi-index (a, X, theta) with total order <= 3.
using DerivOrder = std::array<int, 3>;

struct C1Row {
  double b = 0.0;
  /// sup over the grid for each multi-index; [0] is the X-component, [1] theta.
  std::vector<std::array<double, 2>> sup;
  std::vector<std::array<double, 2>> noise_floor;
  double richardson_change = 0.0;  // largest relative change under step halving
};

struct C1Report {
  std::vector<DerivOrder> orders;
  std::vector<C1Row> rows;
  double exponent_X = 0.0;      // log-log slope of the C0 X-discrepancy against b
  double exponent_theta = 0.0;  // same for theta, 0 when below noise
  bool monotone = false;
  // First offending pair when not monotone.
  double witness_b_large = 0.0;
  double witness_b_small = 0.0;
  int witness_order = -1;
  int witness_component = -1;
  bool pass() const { return monotone; }
};

/// Sampled sup norms of F_{a,b} - (0, F_{a,0}) and its mixed partials up to
/// `max_order`. Needs at least four b values.
C1Report c1_check(const Family2D& family, const GridSpec& grid = {}, int max_order = 3);

struct C3Report {
  double min_abs_derivative = 0.0;
  double witness_a = 0.0;
  double witness_theta = 0.0;
  double max_fd_error = 0.0;  // against singular_dX when available
  std::size_t points_checked = 0;
  bool pass = false;
};

/// |d/dX F_{a,0}(0, c)| > tol at every critical point c of f_a, a over `a_samples`.
C3Report c3_check(const Family2D& family, const std::vector<double>& a_samples, double tol = 1e-6);

struct C4Row {
  double b = 0.0;
  double log_max = 0.0;
  double log_min = 0.0;
  double ratio = 0.0;  // sup/inf of |det DF| over the grid, worst a
  double worst_a = 0.0;
};

struct C4Report {
  std::vector<C4Row> rows;
  double bound = 1e3;
  double max_ratio = 0.0;
  double ratio_spread = 0.0;  // max_b ratio / min_b ratio - 1
  double max_fd_log_error = 0.0;  // finite-difference vs closed form, when available
  bool pass = false;
};

/// Distortion of |det DF_{a,b}| over the (X, theta) grid, evaluated in log space.
C4Report c4_distortion(const Family2D& family, const GridSpec& grid = {}, double bound = 1e3);

/// Jacobian of (X, theta) -> map(a, b, .) by Richardson-extrapolated central differences.
Mat2 fd_jacobian(const Family2D& family, double a, double b, const ASState& s);

}  // namespace rankone
