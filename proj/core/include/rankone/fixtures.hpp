#pragma once

#include <functional>
#include <vector>

#include "rankone/dynsys.hpp"

namespace rankone::fixtures {

/// x' = -alpha x, y' = beta y.
VectorFieldSpec linear_saddle(double alpha, double beta);

/// x' = -y, y' = x (expressed with alpha = beta = 0).
VectorFieldSpec rotation();

/// p' = q, q' = p - p^2 + nu q p written in the saddle eigenbasis
/// X = (p - q)/sqrt2, Y = (p + q)/sqrt2. nu = 0 has an exact homoclinic loop.
VectorFieldSpec cubic(double nu = 0.0);

/// Energy of the cubic fixture at nu = 0, in original (p, q) coordinates.
double cubic_energy(Vec2 pq);
Vec2 cubic_to_pq(Vec2 XY);

/// Field built around the closed curve Q = 0 with Q = xy - c s(x + y),
/// s(t) = exp(-w / (t - t0)) for t > t0. It is exactly (-alpha x, beta y)
/// inside the disc of radius r_linear, so the loop is an exact homoclinic orbit.
struct GluedLoopParams {
  double alpha = 2.0;
  double beta = 1.0;
  double k = 0.0;  // attraction toward the loop away from the saddle
  double c = 1.0;
  double w = 0.5;
  double t0 = 0.6;
  double r_linear = 0.25;
  double r_outer = 0.4;
};

struct GluedLoop {
  GluedLoopParams params;
  VectorFieldSpec field;  // mu = 0, forcing profile h = 4 (y^3 - x^3)
  double curve(Vec2 p) const;
  Vec2 curve_gradient(Vec2 p) const;
  /// Distance estimate |Q| / |grad Q| from the prescribed loop.
  double distance_to_loop(Vec2 p) const;
};

GluedLoop glued_loop(const GluedLoopParams& params = {});

/// Polynomial normal form: f, g list coefficients of x^i y^j in the order
/// 20 11 02 30 21 12 03; h lists 00 10 01 20 11 02 30 21 12 03. Missing
/// trailing coefficients are zero.
VectorFieldSpec polynomial(double alpha, double beta, const std::vector<double>& f,
                           const std::vector<double>& g, const std::vector<double>& h);

/// Smooth step: 1 for r <= r0, 0 for r >= r1.
double smooth_cutoff(double r, double r0, double r1);

}  // namespace rankone::fixtures
