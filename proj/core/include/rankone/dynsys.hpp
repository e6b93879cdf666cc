#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "rankone/errors.hpp"
#include "rankone/linalg.hpp"

namespace rankone {

/// Planar field x' = -alpha x + f - mu (rho h + sin theta),
///              y' =  beta y + g + mu (rho h + sin theta),
/// with theta = theta0 + omega t advanced exactly.
struct VectorFieldSpec {
  double alpha = 1.0;
  double beta = 1.0;
  std::function<Vec2(Vec2)> nonlinear;           // (f, g); empty means zero
  std::function<Mat2(Vec2)> nonlinear_jacobian;  // d(f, g); empty means finite differences
  std::function<double(Vec2)> h;                 // forcing profile; empty means zero
  std::function<Vec2(Vec2)> h_gradient;          // empty means finite differences
  double mu = 0.0;
  double rho = 0.0;
  double omega = 0.0;

  Vec2 velocity(Vec2 p, double theta) const;
  Mat2 jacobian(Vec2 p, double theta) const;
  Vec2 unforced(Vec2 p) const { return velocity_with(p, 0.0, 0.0); }
  Mat2 unforced_jacobian(Vec2 p) const;
  double divergence(Vec2 p, double theta) const { return jacobian(p, theta).trace(); }

  VectorFieldSpec with_mu(double m) const {
    VectorFieldSpec out = *this;
    out.mu = m;
    return out;
  }

 private:
  Vec2 velocity_with(Vec2 p, double mu_eff, double theta) const;
};

/// Throws std::invalid_argument unless mu >= 0, omega is finite, and the
/// nonlinear part and its first partials vanish at the origin (tolerance 1e-8).
void validate_normal_form(const VectorFieldSpec& field, double tol = 1e-8);

struct ExtendedState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 point() const { return {x, y}; }
};

struct IntegratorOptions {
  double tol = 1e-10;
  double h_initial = 0.0;  // 0 picks automatically
  double h_min = 1e-14;
  double h_max = 0.0;  // 0 means unbounded
  std::size_t max_steps = 5'000'000;
};

/// Dense trajectory of an adaptive fifth-order Runge-Kutta run.
class Trajectory {
 public:
  struct Step {
    double t0 = 0.0;
    double h = 0.0;
    std::array<Vec2, 5> r;  // dense-output coefficients
  };

  Trajectory() = default;
  Trajectory(double t_start, double theta_start, double omega)
      : t_start_(t_start), theta_start_(theta_start), omega_(omega) {}

  static constexpr int interpolation_order = 4;

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  bool forward() const { return times_.size() < 2 || times_.back() > times_.front(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec2>& points() const { return points_; }
  std::size_t size() const { return times_.size(); }

  double theta_at(double t) const { return wrap_angle(theta_start_ + omega_ * (t - t_start_)); }
  /// Unwrapped phase, useful for lifts.
  double phase_at(double t) const { return theta_start_ + omega_ * (t - t_start_); }
  Vec2 point_at(double t) const;
  ExtendedState state_at(double t) const;
  ExtendedState back() const { return {points_.back().x, points_.back().y, theta_at(times_.back())}; }

  // Used by the integrator.
  void push_start(double t, Vec2 p);
  void push_step(const Step& step, double t1, Vec2 p1);

 private:
  std::size_t locate(double t) const;

  double t_start_ = 0.0;
  double theta_start_ = 0.0;
  double omega_ = 0.0;
  std::vector<double> times_;
  std::vector<Vec2> points_;
  std::vector<Step> steps_;
};

struct TangentBlock {
  Mat2 jacobian_product = Mat2::identity();
  double divergence_integral = 0.0;  // integral of trace(J) dt
};

/// Time span [t0, t1]; t1 < t0 integrates backward.
struct TimeSpan {
  double t0 = 0.0;
  double t1 = 0.0;
};

Trajectory integrate(const VectorFieldSpec& field, const ExtendedState& start, TimeSpan span,
                     const IntegratorOptions& opts = {});

inline Trajectory integrate(const VectorFieldSpec& field, const ExtendedState& start, TimeSpan span,
                            double tol) {
  IntegratorOptions o;
  o.tol = tol;
  return integrate(field, start, span, o);
}

std::pair<Trajectory, TangentBlock> integrate_with_tangent(const VectorFieldSpec& field,
                                                           const ExtendedState& start,
                                                           TimeSpan span,
                                                           const IntegratorOptions& opts = {});

/// Scalar condition g(x, y) = 0 defining a section.
struct Section {
  std::function<double(Vec2)> g;
  std::function<Vec2(Vec2)> gradient;

  static Section line(Vec2 anchor, Vec2 normal);
  /// Signed distance to a circle, so crossing rates are radial speeds.
  static Section circle(double radius, Vec2 center = {});
};

struct SectionOptions {
  int direction = 0;  // +1: g increasing, -1: g decreasing, 0: either
  double t_max = 100.0;
  double residual_tol = 1e-12;
  /// Crossings rejected by this predicate are skipped.
  std::function<bool(Vec2, double)> accept;
  /// Leaving this region aborts with FailureKind::LeftDomain.
  std::function<bool(Vec2)> domain;
  IntegratorOptions integrator;
};

struct SectionHit {
  ExtendedState state;
  double time = 0.0;  // elapsed since start
  Trajectory trajectory;
};

/// Integrates forward until the first accepted crossing of `section`.
/// A crossing exactly at the start time is never reported.
SectionHit integrate_to_section(const VectorFieldSpec& field, const ExtendedState& start,
                                const Section& section, const SectionOptions& opts);

}  // namespace rankone
