#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace rankone {

/// Degree-d lift of a circle map with derivatives up to third order.
struct CircleMap {
  std::function<double(double)> f;  // lifted: f(t + 2 pi) = f(t) + 2 pi degree
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  std::function<double(double)> d3f;
  std::string name;
  std::map<std::string, double> metadata;

  double operator()(double theta) const;  // reduced to [0, 2 pi)
};

struct CriticalPoint {
  double theta = 0.0;
  double d2f = 0.0;
  bool degenerate = false;  // |f''| < 1e-8
};

/// Sign changes of f' on a uniform grid, refined until |f'| < tol.
std::vector<CriticalPoint> critical_set(const CircleMap& map, int grid_size = 4096,
                                        double tol = 1e-12);
std::vector<double> critical_angles(const std::vector<CriticalPoint>& cps);

struct MisiurewiczOptions {
  int grid_log2 = 16;
  int refine = 16;            // density multiplier near critical points
  double refine_width = 0.5;  // radians around each critical point
  int M0 = 10;
  int cycle_max_period = 8;
  double cycle_tol = 1e-9;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct MisiurewiczReport {
  int horizon = 0;  // every verdict below holds only up to this many iterates
  double delta0 = 0.0;
  double lambda0 = 0.0;
  int M0 = 0;
  double c0 = 1.0;
  bool cond1a = false;
  bool cond1b = false;
  bool cond2a = false;
  bool cond2b = false;
  bool cond2c = false;
  // Witnesses.
  double lambda0_witness_start = 0.0;
  int lambda0_witness_length = 0;
  double c0_witness_start = 0.0;
  double min_abs_d2f = 0.0;
  double cond2a_witness = 0.0;
  std::vector<std::vector<double>> critical_orbits;  // one orbit per critical point
  std::vector<int> critical_landing_period;          // 0 when no repelling cycle was reached
  int cond2b_witness_point = -1;                     // index of the failing critical point
  int cond2b_witness_iterate = -1;
  double cond2b_min_distance = 0.0;
  std::size_t cond2c_checked = 0;
  std::size_t cond2c_unresolved = 0;  // no return within the horizon
  double cond2c_witness = 0.0;
  double cond2c_worst_margin = 0.0;  // log|(f^p)'| - (lambda0 p / 3 - log c0), minimum
  std::vector<double> critical_points;
  bool pass() const { return cond1a && cond1b && cond2a && cond2b && cond2c; }
};

/// delta0 <= 0 selects 0.1 times the smallest gap between critical points.
MisiurewiczReport verify_misiurewicz(const CircleMap& map, double delta0, int horizon,
                                     const MisiurewiczOptions& opts = {});

/// Only the expansion part (cond1a/1b): cheaper for parameter searches.
MisiurewiczReport expansion_estimate(const CircleMap& map, double delta0, int horizon,
                                     const MisiurewiczOptions& opts = {});

double default_delta0(const std::vector<double>& critical);

using CircleFamily = std::function<CircleMap(double a)>;

struct TransversalityResult {
  double xi = 0.0;
  double h_used = 0.0;
  int retries = 0;
  bool nonzero = false;  // |xi| > 1e-4
};

/// Central difference in a of f_a(c(a)) - beta(a), with beta(a) continued by
/// pulling back the f_{a*} orbit of the critical value.
TransversalityResult transversality(const CircleFamily& family, double a_star, double c, double h,
                                    int pullback_steps = 40);

/// Parameters in [a_lo, a_hi] at which the critical value of `c_index` lands
/// on a repelling fixed point of f_a. Requires f_a = f_0 + a.
std::vector<double> landing_parameters(const CircleFamily& family, int c_index, double a_lo,
                                       double a_hi, int grid = 20000);

struct Potential {
  std::function<double(double)> psi;
  std::function<double(double)> dpsi;
  std::function<double(double)> d2psi;
  double amplitude = 0.0;  // sqrt(c1^2 + c2^2) for logarithmic potentials, 0 otherwise
};

/// Psi(t) = -ln(1 + c1 sin t + c2 cos t).
Potential log_potential(double c1, double c2);

struct PropFamilyReport {
  double phi_c3_norm = 0.0;
  bool phi_small = false;  // < 1/100
  std::vector<double> psi_critical;
  bool psi_nondegenerate = false;
  double K_threshold = 0.0;  // empirical expansion threshold
  bool K_exceeds = false;
  bool amplitude_warning = false;  // amplitude > 1/2
  bool pass() const { return phi_small && psi_nondegenerate && K_exceeds; }
};

/// Family f_a(t) = t + a + K Psi(t) + Phi(t, a); Phi may be empty.
PropFamilyReport check_prop_family(const Potential& psi,
                                   const std::function<double(double, double)>& phi, double K,
                                   int grid = 2048);

}  // namespace rankone
