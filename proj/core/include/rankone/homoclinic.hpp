#pragma once

#include <cstddef>
#include <vector>

#include "rankone/dynsys.hpp"

namespace rankone {

struct SaddleInfo {
  Vec2 position;
  double alpha = 0.0;  // contraction rate, |negative eigenvalue|
  double beta = 0.0;   // expansion rate
  Vec2 eigvec_stable;
  Vec2 eigvec_unstable;
};

/// Newton iteration for a zero of the unforced field, then eigen-analysis.
SaddleInfo locate_saddle(const VectorFieldSpec& field, Vec2 guess, double tol = 1e-12);

struct H1Report {
  bool dissipative = false;
  bool diophantine_pass = false;
  int worst_m = 0;
  int worst_n = 0;
  double worst_value = 0.0;
  double worst_bound = 0.0;
  int search_depth = 0;  // verdict holds only up to this depth
};

/// Checks |m alpha - n beta| > d1 (m + n)^(-d2) for 1 <= m, n <= depth and beta < alpha.
H1Report check_H1(double alpha, double beta, double d1, double d2, int depth);

struct HomoclinicOrbit {
  std::vector<double> s;
  std::vector<Vec2> ell;
  std::vector<Vec2> tangent;  // unit (u, v)
  std::vector<double> E;
  /// Indices where the uniform sub-grids start, ending with s.size() - 1.
  /// The sub-grids are [s_lo, -L-], [-L-, 0], [0, L+], [L+, s_hi].
  std::vector<std::size_t> breaks;
  double L_minus = 0.0;
  double L_plus = 0.0;
  double epsilon = 0.0;
  double closure_residual = 0.0;
  bool connected = false;
  Vec2 saddle;
  double alpha = 0.0;
  double beta = 0.0;

  std::size_t size() const { return s.size(); }
  std::size_t index_of(double s_value) const;  // nearest sample
  std::size_t zero_index() const { return breaks.size() >= 3 ? breaks[2] : 0; }
  std::size_t minus_index() const { return breaks.size() >= 2 ? breaks[1] : 0; }
  std::size_t plus_index() const { return breaks.size() >= 4 ? breaks[3] : 0; }
};

struct HomoclinicOptions {
  double launch_factor = 1e-8;  // launch distance = launch_factor * epsilon
  int tail_decades = 5;         // sample down to epsilon * 10^-tail_decades
  double ds = 2e-3;
  double integrator_tol = 1e-11;
  double box = 10.0;  // |x|, |y| bound relative to the saddle
  double t_max = 500.0;
};

/// Shoots along the unstable eigenvector around the loop. A closure residual
/// above `tol` returns the partial orbit with connected = false.
HomoclinicOrbit compute_homoclinic(const VectorFieldSpec& field, const SaddleInfo& saddle,
                                   double epsilon, double tol,
                                   const HomoclinicOptions& opts = {});

/// Fills unit tangents and the normal expansion rate e J e^T, e = (v, -u).
void frames_and_E(HomoclinicOrbit& orbit, const VectorFieldSpec& field);

struct AsymptoticsReport {
  double forward_slope = 0.0;   // d ln|l(s)| / ds for s -> +inf, expect -alpha
  double backward_slope = 0.0;  // d ln|l(-s)| / ds, expect -beta
  bool forward_ok = false;
  bool backward_ok = false;
  double E_tail_rate = 0.0;        // mean of E over the forward tail, expect beta
  double E_integral_ratio = 0.0;   // int_0^s E / (beta s) at the end of the forward tail
  bool E_integral_ok = false;
  double backward_partial_spread = 0.0;  // spread of int_{-L}^0 (E + alpha) over the last decade
  bool backward_partial_ok = false;
  std::size_t forward_samples = 0;
  std::size_t backward_samples = 0;
};

AsymptoticsReport check_asymptotics(const HomoclinicOrbit& orbit, const SaddleInfo& saddle);

}  // namespace rankone
