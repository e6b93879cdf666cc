#include "rankone/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace rankone::fixtures {

VectorFieldSpec linear_saddle(double alpha, double beta) {
  VectorFieldSpec f;
  f.alpha = alpha;
  f.beta = beta;
  return f;
}

VectorFieldSpec rotation() {
  VectorFieldSpec f;
  f.alpha = 0.0;
  f.beta = 0.0;
  f.nonlinear = [](Vec2 p) { return Vec2{-p.y, p.x}; };
  f.nonlinear_jacobian = [](Vec2) { return Mat2{0.0, -1.0, 1.0, 0.0}; };
  return f;
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

Vec2 cubic_to_pq(Vec2 XY) { return {(XY.x + XY.y) * kInvSqrt2, (-XY.x + XY.y) * kInvSqrt2}; }

double cubic_energy(Vec2 pq) {
  return 0.5 * pq.y * pq.y - 0.5 * pq.x * pq.x + pq.x * pq.x * pq.x / 3.0;
}

VectorFieldSpec cubic(double nu) {
  VectorFieldSpec f;
  f.alpha = 1.0;
  f.beta = 1.0;
  f.nonlinear = [nu](Vec2 XY) {
    const Vec2 pq = cubic_to_pq(XY);
    const double n = (pq.x * pq.x - nu * pq.y * pq.x) * kInvSqrt2;
    return Vec2{n, -n};
  };
  f.nonlinear_jacobian = [nu](Vec2 XY) {
    const Vec2 pq = cubic_to_pq(XY);
    // d n / d(p, q), then chain through dp/dX = 1/sqrt2, dp/dY = 1/sqrt2, dq/dX = -1/sqrt2, dq/dY = 1/sqrt2.
    const double np = (2.0 * pq.x - nu * pq.y) * kInvSqrt2;
    const double nq = (-nu * pq.x) * kInvSqrt2;
    const double nX = (np - nq) * kInvSqrt2;
    const double nY = (np + nq) * kInvSqrt2;
    return Mat2{nX, nY, -nX, -nY};
  };
  return f;
}

double smooth_cutoff(double r, double r0, double r1) {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  const double u = (r1 - r) / (r1 - r0);
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

namespace {

struct Bump {
  double w, t0;
  double s(double t) const { return t > t0 ? std::exp(-w / (t - t0)) : 0.0; }
  double ds(double t) const {
    if (t <= t0) return 0.0;
    const double d = t - t0;
    return s(t) * w / (d * d);
  }
};

}  // namespace

double GluedLoop::curve(Vec2 p) const {
  const Bump b{params.w, params.t0};
  return p.x * p.y - params.c * b.s(p.x + p.y);
}

Vec2 GluedLoop::curve_gradient(Vec2 p) const {
  const Bump b{params.w, params.t0};
  const double d = params.c * b.ds(p.x + p.y);
  return {p.y - d, p.x - d};
}

double GluedLoop::distance_to_loop(Vec2 p) const {
  return std::abs(curve(p)) / norm(curve_gradient(p));
}

GluedLoop glued_loop(const GluedLoopParams& params) {
  GluedLoop out;
  out.params = params;
  const GluedLoop shape = out;
  const double kappa = 0.5 * (params.alpha + params.beta);
  const double skew = 0.5 * (params.beta - params.alpha);

  VectorFieldSpec f;
  f.alpha = params.alpha;
  f.beta = params.beta;
  f.nonlinear = [shape, kappa, skew](Vec2 p) {
    const auto& pr = shape.params;
    const double q = shape.curve(p);
    const Vec2 gq = shape.curve_gradient(p);
    const double chi = smooth_cutoff(norm(p), pr.r_linear, pr.r_outer);
    Vec2 v = -kappa * Vec2{gq.y, -gq.x};
    v += chi * skew * Vec2{gq.y, gq.x};
    v += (1.0 - chi) * pr.k * q * gq;
    return v - Vec2{-pr.alpha * p.x, pr.beta * p.y};
  };
  // Cubic profile keeps the forcing weight small inside the saddle neighborhood.
  f.h = [](Vec2 p) { return 4.0 * (p.y * p.y * p.y - p.x * p.x * p.x); };
  f.h_gradient = [](Vec2 p) { return Vec2{-12.0 * p.x * p.x, 12.0 * p.y * p.y}; };
  out.field = f;
  return out;
}

}  // namespace rankone::fixtures

namespace rankone::fixtures {

namespace {

constexpr int kPowers[10][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1},
                                {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};

// Value and gradient of sum c_k x^i y^j over monomials starting at `first`.
struct Poly {
  std::vector<double> c;
  int first = 0;

  double value(Vec2 p) const {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const auto& e = kPowers[first + k];
      s += c[k] * std::pow(p.x, e[0]) * std::pow(p.y, e[1]);
    }
    return s;
  }
  Vec2 gradient(Vec2 p) const {
    Vec2 g;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const auto& e = kPowers[first + k];
      if (e[0] > 0) g.x += c[k] * e[0] * std::pow(p.x, e[0] - 1) * std::pow(p.y, e[1]);
      if (e[1] > 0) g.y += c[k] * e[1] * std::pow(p.x, e[0]) * std::pow(p.y, e[1] - 1);
    }
    return g;
  }
};

}  // namespace

VectorFieldSpec polynomial(double alpha, double beta, const std::vector<double>& f,
                           const std::vector<double>& g, const std::vector<double>& h) {
  if (f.size() > 7 || g.size() > 7 || h.size() > 10)
    throw std::invalid_argument("polynomial field supports degree 3 at most");
  const Poly pf{f, 3}, pg{g, 3}, ph{h, 0};
  VectorFieldSpec v;
  v.alpha = alpha;
  v.beta = beta;
  v.nonlinear = [pf, pg](Vec2 p) { return Vec2{pf.value(p), pg.value(p)}; };
  v.nonlinear_jacobian = [pf, pg](Vec2 p) {
    const Vec2 a = pf.gradient(p), b = pg.gradient(p);
    return Mat2{a.x, a.y, b.x, b.y};
  };
  v.h = [ph](Vec2 p) { return ph.value(p); };
  v.h_gradient = [ph](Vec2 p) { return ph.gradient(p); };
  return v;
}

}  // namespace rankone::fixtures
