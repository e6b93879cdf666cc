#pragma once

#include <string>
#include <vector>

#include "rankone/dynsys.hpp"
#include "rankone/homoclinic.hpp"
#include "rankone/melnikov.hpp"

namespace rankone {

enum class SectionKind { SigmaMinus, SigmaPlus };

/// Line section through l(s) transverse to the loop, charted by
/// z -> l(s) + z n with n = (v, -u).
struct SectionSpec {
  SectionKind kind = SectionKind::SigmaMinus;
  double anchor_s = 0.0;
  Vec2 base;
  Vec2 normal;
  Vec2 tangent;
  double z_lo = 0.0;
  double z_hi = 0.0;

  Vec2 point(double z) const { return base + z * normal; }
  double chart(Vec2 p) const { return dot(p - base, normal); }
  bool contains(double z) const { return z >= z_lo && z <= z_hi; }
  Section section() const { return Section::line(base, tangent); }
};

struct SectionPair {
  SectionSpec minus;
  SectionSpec plus;
  double mu = 0.0;
  double K0hat = 0.0;
  double minus_rho_A = 0.0;  // -rho A_L
  double L_plus = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  Vec2 saddle;

  /// Same geometry with ranges rescaled to another mu.
  SectionPair with_mu(double m) const;
};

/// Sections at s = -L- and s = L+; z-ranges scale with mu. Throws SignError when K1 <= 0.
SectionPair build_sections(const HomoclinicOrbit& orbit, double mu, const WaveCoefficients& waves,
                           double K0hat);

struct PeriodicOrbit {
  Vec2 start;  // point at theta = 0
  std::vector<Vec2> samples;
  double max_deviation = 0.0;  // from the saddle
  double residual = 0.0;
  int iterations = 0;
};

/// Single shooting for the 2 pi / omega periodic orbit near the saddle.
PeriodicOrbit periodic_orbit(const VectorFieldSpec& field, Vec2 saddle, double tol = 1e-13,
                             int max_iter = 20);

/// Largest deviation of the continued periodic orbit from the saddle, per unit mu.
double estimate_K0hat(const VectorFieldSpec& field, Vec2 saddle, double mu);

enum class ReturnStatus { Ok, OutsidePlusRange, NoReturnOuter, NoReturnInner };

std::string_view to_string(ReturnStatus s);

struct ReturnSample {
  double Z0 = 0.0;
  double theta0 = 0.0;
  double Z_hat = 0.0;      // z / mu on the outgoing section
  double theta_hat = 0.0;  // phase there, lifted from theta0
  double Z1 = 0.0;
  double theta1 = 0.0;  // lifted from theta0
  double t_M = 0.0;
  double t_N = 0.0;
  double mu = 0.0;
  ReturnStatus status = ReturnStatus::Ok;  // first problem encountered
  bool reached_plus = false;
  bool in_plus_range = false;
  bool returned = false;
  bool in_minus_range = false;
};

struct FlowOptions {
  double tol = 1e-12;
  double t_max_outer = 0.0;  // 0 picks 4 (L- + L+) + 20
  double t_max_inner = 0.0;  // 0 picks (4 ln(1/mu) + 40) / beta, or 10 / beta at mu = 0
  double capture = 1.0;      // crossings count within capture * epsilon of the anchor
};

/// Integrates the forced field from (Z0, theta0) on the incoming section around
/// the loop and back through the saddle region. Failures are flagged in status.
ReturnSample return_map_flow(const VectorFieldSpec& field, const SectionPair& sections, double Z0,
                             double theta0, const FlowOptions& opts = {});

/// Grid of samples, independent and evaluated in parallel; order follows the input.
std::vector<ReturnSample> return_map_grid(const VectorFieldSpec& field, const SectionPair& sections,
                                          const std::vector<double>& Z0s,
                                          const std::vector<double>& thetas,
                                          const FlowOptions& opts = {}, unsigned threads = 1);

/// Determinant of d(Z1, theta1)/d(Z0, theta0) by central differences.
double return_map_determinant(const VectorFieldSpec& field, const SectionPair& sections, double Z0,
                              double theta0, double h = 1e-4, const FlowOptions& opts = {});

struct PredictionWindow {
  double L_minus = 0.0;
  double L_plus = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double omega = 0.0;
};

PredictionWindow window_of(const HomoclinicOrbit& orbit, double omega);

struct Prediction {
  double Z_hat = 0.0;
  double theta_hat = 0.0;
  double X1 = 0.0;
  double theta1 = 0.0;
};

/// Leading-order return map. Throws SignError when Z_hat <= 0.
Prediction analytic_prediction(double X0, double theta0, double mu, const WaveCoefficients& waves,
                               const PredictionWindow& w);

struct MStageReport {
  std::vector<ReturnSample> samples;
  std::vector<Prediction> predictions;
  double max_relative_error = 0.0;
  double max_phase_error = 0.0;  // |theta_hat numeric - predicted|, wrapped
  double band = 0.05;
  bool all_in_plus_range = false;
  bool all_returned = false;
  bool pass() const { return all_returned && all_in_plus_range && max_relative_error <= band; }
};

/// Numeric outgoing-section image against K1 (1 + c1 sin + c2 cos) + P_L Z0 on a grid.
MStageReport m_stage_check(const VectorFieldSpec& field, const SectionPair& sections,
                           const WaveCoefficients& waves, const PredictionWindow& w,
                           const std::vector<double>& Z0s, const std::vector<double>& thetas,
                           double band = 0.05, const FlowOptions& opts = {},
                           unsigned threads = 1);

struct PassageReport {
  std::vector<double> mu;
  std::vector<double> t_N;
  std::vector<double> t_M;
  std::vector<double> residual;
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
  double curvature = 0.0;  // quadratic coefficient of a second fit, in units of 1/beta
  double K4 = 0.0;         // min t_N / ln(1/mu)
  double K5 = 0.0;         // max t_N / ln(1/mu)
  double max_escape_product = 0.0;  // max over samples of e^{-alpha t_N} / mu
  bool slope_ok = false;     // |slope beta - 1| < 1%
  bool trend_flag = false;   // nonlinear residual trend visible
  bool escape_ok = false;    // max_escape_product < 1
  bool pass() const { return slope_ok && !trend_flag && escape_ok; }
};

/// Regression of inner passage time against ln(1/mu). Needs at least 5 values
/// spanning 3 decades.
PassageReport passage_time_check(const VectorFieldSpec& field, const SectionPair& sections,
                                 const std::vector<double>& mu_grid, double Z0 = 0.0,
                                 double theta0 = 0.0, const FlowOptions& opts = {});

}  // namespace rankone
