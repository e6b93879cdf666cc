#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rankone/homoclinic.hpp"

namespace rankone {

/// Integrand samples on a piecewise-uniform grid (see HomoclinicOrbit::breaks).
struct MelnikovSamples {
  std::vector<double> s;
  std::vector<double> weight;   // u + v
  std::vector<double> profile;  // h along the orbit
  std::vector<double> E;
  std::vector<std::size_t> breaks;  // five entries: s_lo, -L-, 0, L+, s_hi
  double L_minus = 0.0;
  double L_plus = 0.0;
  double epsilon = 0.0;
};

MelnikovSamples melnikov_samples(const HomoclinicOrbit& orbit, const VectorFieldSpec& field);

struct MelnikovData {
  double A = 0.0, C = 0.0, S = 0.0;
  double A_L = 0.0, C_L = 0.0, S_L = 0.0;
  double rho1 = 0.0, rho2 = 0.0;
  double omega = 0.0;
  double L_minus = 0.0, L_plus = 0.0, epsilon = 0.0;
  double tail_estimate = 0.0;  // |A - A_L|
  double rate_forward = 0.0;   // fitted decay rates of the tails
  double rate_backward = 0.0;
  double E_integral_plus = 0.0;   // int_0^{L+} E
  double E_integral_total = 0.0;  // int_{-L-}^{L+} E
  /// sqrt(C_L^2 + S_L^2) / sqrt(C^2 + S^2); far from 1 means the window is short for C, S.
  double cs_window_ratio = 1.0;
  bool cs_window_ok = true;
};

struct MelnikovOptions {
  double window_tol = 0.01;  // relative tail size that triggers WindowTooShort
  double cs_window_tol = 0.05;
  std::size_t fit_points = 50;
};

MelnikovData compute_ACS(const MelnikovSamples& samples, double omega,
                         const MelnikovOptions& opts = {});
MelnikovData compute_ACS(const HomoclinicOrbit& orbit, const VectorFieldSpec& field, double omega,
                         const MelnikovOptions& opts = {});

/// Ordered pair (min, max) of -(202/99) R / A and -(396/101) R / A, R = sqrt(C^2 + S^2).
std::pair<double, double> rho_interval(const MelnikovData& data, double tol = 1e-12);

struct WaveCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double K1 = 0.0;
  double P_L = 0.0;
  double rho = 0.0;
  double amplitude = 0.0;  // sqrt(c1^2 + c2^2)
  bool band_ok = false;    // 1/4 < amplitude < 1/2
  bool rho_in_interval = false;
};

/// Throws FailureKind::SignError when -rho A_L <= 0.
WaveCoefficients wave_coefficients(const MelnikovData& data, double rho);

struct H2Report {
  bool nonzero_A = false;
  bool nonzero_CS = false;
  bool pass = false;
};

H2Report check_H2(const MelnikovData& data, double tol = 1e-6);

}  // namespace rankone
