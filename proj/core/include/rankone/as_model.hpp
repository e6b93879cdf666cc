#pragma once

#include <utility>

#include "rankone/linalg.hpp"
#include "rankone/onedim.hpp"

namespace rankone {

/// Parameters of the as-model return-map family on the section.
struct ASParams {
  double alpha = 2.0;
  double beta = 1.0;
  double epsilon = 0.1;
  double lambda = 0.5;
  double xi1 = 1.0;
  double xi2 = 0.5;
  double B = 1.0;
  double A_amp = 0.3;
  double omega = 100.0;
  double mu = 1e-4;
  double mu0 = 1e-3;
  double C1 = 0.0;  // X-domain bound; 0 means 10 B

  double ratio() const { return alpha / beta; }
  double frequency_ratio() const { return omega / beta; }
  double x_domain() const { return C1 > 0.0 ? C1 : 10.0 * B; }
  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
  ASParams with_mu(double m) const {
    ASParams p = *this;
    p.mu = m;
    return p;
  }
};

struct ASState {
  double X = 0.0;
  double theta = 0.0;
};

/// Passage near the saddle: (y_hat, theta_hat) -> (x1, theta1). Throws std::domain_error for y_hat <= 0.
std::pair<double, double> map_N(double y_hat, double theta_hat, const ASParams& p);
/// Excursion along the loop: (x0, theta0) -> (y_hat, theta_hat).
std::pair<double, double> map_M(double x0, double theta0, const ASParams& p);
/// Composed map in rescaled coordinates x = mu X.
ASState map_F(const ASState& s, const ASParams& p);
/// Same, with theta left unreduced (for lifts and finite differences).
ASState map_F_lifted(const ASState& s, const ASParams& p);
Mat2 jacobian_F(const ASState& s, const ASParams& p);
double log_det_F(const ASState& s, const ASParams& p);

struct FamilyIndex {
  int n = 0;
  double a = 0.0;
  double b_n = 0.0;   // mu_n
  double mu_na = 0.0;  // mu(n, a)
  int N = 0;
};

/// Smallest integer exceeding (omega/beta) ln(1/mu0).
int family_offset(const ASParams& p);
double gamma_of(double mu, const ASParams& p);
FamilyIndex reparametrize(const ASParams& p, int n, double a);

/// theta-component of the singular limit (lifted); the X-component is 0.
double singular_theta(const ASParams& p, double a, double X, double theta);

/// Rank-one family member F_{a,b} for b = mu_n. a is shifted by N mod 2 pi so
/// that the theta-discrepancy with the singular limit is mu xi2 mod 2 pi.
double family_mu(const ASParams& p, double a, double b);
ASState family_map_lifted(const ASParams& p, double a, double b, const ASState& s);

/// f_a(t) = t + xi1 + (omega/beta) ln eps + a - (omega/beta) ln(B (1 + A sin t)).
CircleMap circle_map(const ASParams& p, double a);

}  // namespace rankone
