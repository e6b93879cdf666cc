#include "rankone/homoclinic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rankone/quadrature.hpp"

namespace rankone {

SaddleInfo locate_saddle(const VectorFieldSpec& field, Vec2 guess, double tol) {
  Vec2 p = guess;
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    const Vec2 f = field.unforced(p);
    if (norm(f) < tol) {
      converged = true;
      break;
    }
    const Mat2 j = field.unforced_jacobian(p);
    const double det = j.det();
    if (det == 0.0 || !std::isfinite(det))
      throw NumericFailure(FailureKind::NewtonDivergence, "singular Jacobian in saddle search",
                           {p.x, p.y});
    const Vec2 step{(j.a22 * f.x - j.a12 * f.y) / det, (-j.a21 * f.x + j.a11 * f.y) / det};
    p -= step;
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || norm(p - guess) > 1e6)
      throw NumericFailure(FailureKind::NewtonDivergence, "saddle search diverged",
                           {p.x, p.y});
  }
  if (!converged && norm(field.unforced(p)) >= tol)
    throw NumericFailure(FailureKind::NewtonDivergence, "saddle search did not converge",
                         {p.x, p.y});

  const Mat2 j = field.unforced_jacobian(p);
  const Eigen2 eig = eigen(j);
  if (!eig.real || !(eig.lambda1 < 0.0 && eig.lambda2 > 0.0))
    throw NumericFailure(FailureKind::NotASaddle, "fixed point is not a saddle",
                         {p.x, p.y, j.trace(), j.det()});

  SaddleInfo out;
  out.position = p;
  out.alpha = -eig.lambda1;
  out.beta = eig.lambda2;
  out.eigvec_stable = eig.v1;
  out.eigvec_unstable = eig.v2;
  // Orient toward the positive axes.
  if (out.eigvec_stable.x < 0.0 || (out.eigvec_stable.x == 0.0 && out.eigvec_stable.y < 0.0))
    out.eigvec_stable = -out.eigvec_stable;
  if (out.eigvec_unstable.y < 0.0 || (out.eigvec_unstable.y == 0.0 && out.eigvec_unstable.x < 0.0))
    out.eigvec_unstable = -out.eigvec_unstable;
  return out;
}

H1Report check_H1(double alpha, double beta, double d1, double d2, int depth) {
  if (depth < 2) throw std::invalid_argument("H1 search depth must be at least 2");
  H1Report rep;
  rep.dissipative = beta > 0.0 && beta < alpha;
  rep.search_depth = depth;
  rep.diophantine_pass = true;
  double worst_ratio = std::numeric_limits<double>::infinity();
  const double scale = std::max(std::abs(alpha), std::abs(beta));
  for (int m = 1; m <= depth; ++m) {
    for (int n = 1; n <= depth; ++n) {
      double value = std::abs(m * alpha - n * beta);
      if (value <= 1e-14 * scale * (m + n)) value = 0.0;
      const double bound = d1 * std::pow(static_cast<double>(m + n), -d2);
      const double ratio = value / bound;
      if (value <= bound) rep.diophantine_pass = false;
      if (ratio < worst_ratio) {
        worst_ratio = ratio;
        rep.worst_m = m;
        rep.worst_n = n;
        rep.worst_value = value;
        rep.worst_bound = bound;
      }
    }
  }
  return rep;
}

std::size_t HomoclinicOrbit::index_of(double s_value) const {
  auto it = std::lower_bound(s.begin(), s.end(), s_value);
  if (it == s.end()) return s.size() - 1;
  std::size_t i = static_cast<std::size_t>(it - s.begin());
  if (i > 0 && std::abs(s[i - 1] - s_value) < std::abs(s[i] - s_value)) --i;
  return i;
}

namespace {

double radius(const Trajectory& tr, double t, Vec2 c) { return norm(tr.point_at(t) - c); }

/// First time after `from` at which the distance to `c` crosses `r` upward.
double first_exit(const Trajectory& tr, Vec2 c, double r, double from, double until) {
  const auto& ts = tr.times();
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] <= from) continue;
    if (ts[i - 1] > until) break;
    double a = std::max(ts[i - 1], from), b = std::min(ts[i], until);
    if (radius(tr, a, c) < r && radius(tr, b, c) >= r) {
      for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++k) {
        const double m = 0.5 * (a + b);
        (radius(tr, m, c) < r ? a : b) = m;
      }
      return 0.5 * (a + b);
    }
  }
  throw NumericFailure(FailureKind::NoLoop, "orbit never leaves the given radius", {r});
}

/// Time of the farthest point from `c`; exact ties go to the earliest time.
double argmax_radius(const Trajectory& tr, const VectorFieldSpec& field, Vec2 c, double until) {
  auto radial = [&](double t) {
    const Vec2 p = tr.point_at(t);
    return dot(p - c, field.unforced(p));
  };
  const auto& ts = tr.times();
  double best_t = ts.front(), best_r = radius(tr, best_t, c);
  for (std::size_t i = 1; i < ts.size() && ts[i - 1] < until; ++i) {
    double a = ts[i - 1], b = std::min(ts[i], until);
    if (!(radial(a) > 0.0 && radial(b) <= 0.0)) continue;
    for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++k) {
      const double m = 0.5 * (a + b);
      (radial(m) > 0.0 ? a : b) = m;
    }
    const double t = 0.5 * (a + b);
    const double r = radius(tr, t, c);
    if (r > best_r * (1.0 + 1e-9)) {
      best_r = r;
      best_t = t;
    }
  }
  return best_t;
}

void append_uniform(std::vector<double>& s, std::vector<std::size_t>& breaks, double lo, double hi,
                    double ds) {
  const auto n = static_cast<std::size_t>(std::max(3.0, std::ceil((hi - lo) / ds)));
  if (s.empty()) {
    s.push_back(lo);
    breaks.push_back(0);
  }
  for (std::size_t k = 1; k <= n; ++k)
    s.push_back(k == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n));
  breaks.push_back(s.size() - 1);
}

}  // namespace

HomoclinicOrbit compute_homoclinic(const VectorFieldSpec& field, const SaddleInfo& saddle,
                                   double epsilon, double tol, const HomoclinicOptions& opts) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (field.mu != 0.0) throw std::invalid_argument("homoclinic orbit requires mu = 0");
  const double delta = opts.launch_factor * epsilon;
  const double r_stop = epsilon * std::pow(10.0, -opts.tail_decades);
  if (!(r_stop > delta)) throw std::invalid_argument("tail radius must exceed the launch offset");

  const Vec2 c = saddle.position;
  const Vec2 launch = c + delta * saddle.eigvec_unstable;
  const double box = opts.box;
  SectionOptions so;
  so.direction = -1;
  so.t_max = opts.t_max;
  so.integrator.tol = opts.integrator_tol;
  so.domain = [c, box](Vec2 p) { return std::abs(p.x - c.x) <= box && std::abs(p.y - c.y) <= box; };
  // Return section: the line crossing the stable direction at distance epsilon.
  const Vec2 es = saddle.eigvec_stable;
  const Section ball = Section::line(c + epsilon * es, es);
  SectionOptions back = so;
  back.accept = [c, epsilon](Vec2 p, double) { return norm(p - c) < 10.0 * epsilon; };

  // Outbound leg: stop when the orbit first passes 2 epsilon, then look for re-entry.
  SectionHit out_hit;
  try {
    SectionOptions leave = so;
    leave.direction = 1;
    const Section big = Section::circle(2.0 * epsilon, c);
    out_hit = integrate_to_section(field, {launch.x, launch.y, 0.0}, big, leave);
  } catch (const NumericFailure& e) {
    if (e.kind() == FailureKind::LeftDomain || e.kind() == FailureKind::NoReturn ||
        e.kind() == FailureKind::StepSizeUnderflow)
      throw NumericFailure(FailureKind::NoLoop, std::string("no loop: ") + e.what(), e.witness());
    throw;
  }

  SectionHit back_hit;
  try {
    back_hit = integrate_to_section(field, out_hit.state, ball, back);
  } catch (const NumericFailure& e) {
    if (e.kind() == FailureKind::LeftDomain || e.kind() == FailureKind::NoReturn ||
        e.kind() == FailureKind::StepSizeUnderflow)
      throw NumericFailure(FailureKind::NoLoop, std::string("no loop: ") + e.what(), e.witness());
    throw;
  }

  HomoclinicOrbit orbit;
  orbit.epsilon = epsilon;
  orbit.saddle = c;
  orbit.alpha = saddle.alpha;
  orbit.beta = saddle.beta;
  // Incoming leg: the local stable manifold, shot backward from the tail radius.
  VectorFieldSpec rev = field;
  rev.alpha = -field.alpha;
  rev.beta = -field.beta;
  if (field.nonlinear) rev.nonlinear = [f = field.nonlinear](Vec2 p) { return -f(p); };
  if (field.nonlinear_jacobian)
    rev.nonlinear_jacobian = [j = field.nonlinear_jacobian](Vec2 p) { return -1.0 * j(p); };
  SectionOptions sb = so;
  sb.direction = 1;
  const Vec2 tail_start = c + r_stop * es;
  const SectionHit stable_hit =
      integrate_to_section(rev, {tail_start.x, tail_start.y, 0.0}, ball, sb);
  const Vec2 stable_point = stable_hit.state.point();
  orbit.closure_residual = std::abs(cross(es, back_hit.state.point() - stable_point));
  orbit.connected = orbit.closure_residual <= tol;

  const Trajectory& t1 = out_hit.trajectory;
  const Trajectory& t2 = back_hit.trajectory;
  const double t_switch = out_hit.time;
  const double t_return = t_switch + back_hit.time;
  auto point_at = [&](double t) {
    return t <= t_switch ? t1.point_at(t) : t2.point_at(t - t_switch);
  };

  if (!orbit.connected) {
    // Report the computed arc without the incoming tail.
    const double dt = opts.ds;
    for (double t = 0.0; t <= t_return; t += dt) {
      orbit.s.push_back(t);
      orbit.ell.push_back(point_at(t));
    }
    return orbit;
  }

  const Trajectory& t3 = stable_hit.trajectory;
  const double t_end = t_return + stable_hit.time;
  auto at = [&](double t) {
    return t <= t_return ? point_at(t) : t3.point_at(stable_hit.time - (t - t_return));
  };

  const double t_peak = std::max(argmax_radius(t2, field, c, back_hit.time) + t_switch, 0.0);
  const double t_start = first_exit(t1, c, r_stop, 0.0, t_switch);
  const double t_eps = first_exit(t1, c, epsilon, 0.0, t_switch);
  orbit.L_minus = t_peak - t_eps;
  orbit.L_plus = t_return - t_peak;
  if (!(orbit.L_minus > 0.0 && orbit.L_plus > 0.0))
    throw NumericFailure(FailureKind::NoLoop, "loop too small for the chosen epsilon",
                         {orbit.L_minus, orbit.L_plus});

  append_uniform(orbit.s, orbit.breaks, t_start - t_peak, -orbit.L_minus, opts.ds);
  append_uniform(orbit.s, orbit.breaks, -orbit.L_minus, 0.0, opts.ds);
  append_uniform(orbit.s, orbit.breaks, 0.0, orbit.L_plus, opts.ds);
  append_uniform(orbit.s, orbit.breaks, orbit.L_plus, t_end - t_peak, opts.ds);

  orbit.ell.reserve(orbit.s.size());
  for (double s : orbit.s) orbit.ell.push_back(at(s + t_peak));
  frames_and_E(orbit, field);
  return orbit;
}

void frames_and_E(HomoclinicOrbit& orbit, const VectorFieldSpec& field) {
  orbit.tangent.resize(orbit.ell.size());
  orbit.E.resize(orbit.ell.size());
  for (std::size_t i = 0; i < orbit.ell.size(); ++i) {
    const Vec2 p = orbit.ell[i];
    const Vec2 v = field.unforced(p);
    const double sp = norm(v);
    if (!(sp > 1e-300) || !std::isfinite(sp))
      throw NumericFailure(FailureKind::DegenerateSample, "zero velocity on the orbit",
                           {orbit.s.empty() ? 0.0 : orbit.s[i], p.x, p.y});
    const Vec2 t = v / sp;
    orbit.tangent[i] = t;
    const Vec2 e{t.y, -t.x};
    orbit.E[i] = dot(e, field.unforced_jacobian(p) * e);
  }
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

AsymptoticsReport check_asymptotics(const HomoclinicOrbit& orbit, const SaddleInfo& saddle) {
  if (orbit.breaks.size() != 5 || orbit.E.size() != orbit.s.size())
    throw NumericFailure(FailureKind::InsufficientTail, "orbit has no sampled tails");
  AsymptoticsReport rep;
  std::vector<double> xs, ys;
  for (std::size_t i = orbit.plus_index(); i < orbit.size(); ++i) {
    xs.push_back(orbit.s[i]);
    ys.push_back(std::log(norm(orbit.ell[i] - orbit.saddle)));
  }
  rep.forward_samples = xs.size();
  if (xs.size() < 10)
    throw NumericFailure(FailureKind::InsufficientTail, "forward tail has too few samples",
                         {static_cast<double>(xs.size())});
  rep.forward_slope = ls_slope(xs, ys);
  xs.clear();
  ys.clear();
  for (std::size_t i = 0; i <= orbit.minus_index(); ++i) {
    xs.push_back(-orbit.s[i]);
    ys.push_back(std::log(norm(orbit.ell[i] - orbit.saddle)));
  }
  rep.backward_samples = xs.size();
  if (xs.size() < 10)
    throw NumericFailure(FailureKind::InsufficientTail, "backward tail has too few samples",
                         {static_cast<double>(xs.size())});
  rep.backward_slope = ls_slope(xs, ys);
  rep.forward_ok = std::abs(rep.forward_slope + saddle.alpha) <= 0.05 * saddle.alpha;
  rep.backward_ok = std::abs(rep.backward_slope + saddle.beta) <= 0.05 * saddle.beta;

  const auto intE = cumulative_piecewise(orbit.s, orbit.E, orbit.breaks, orbit.zero_index());
  double mean = 0.0;
  for (std::size_t i = orbit.plus_index(); i < orbit.size(); ++i) mean += orbit.E[i];
  rep.E_tail_rate = mean / static_cast<double>(orbit.size() - orbit.plus_index());
  rep.E_integral_ratio = intE.back() / (saddle.beta * orbit.s.back());
  rep.E_integral_ok = std::abs(rep.E_tail_rate - saddle.beta) <= 0.05 * saddle.beta &&
                      std::abs(rep.E_integral_ratio - 1.0) <
                          std::abs(intE[orbit.plus_index()] /
                                       (saddle.beta * orbit.s[orbit.plus_index()]) -
                                   1.0) + 1e-12;

  // int_{-L}^0 (E + alpha) for L across the last decade of the backward tail.
  std::vector<double> shifted(orbit.E);
  for (double& e : shifted) e += saddle.alpha;
  const auto intA = cumulative_piecewise(orbit.s, shifted, orbit.breaks, orbit.zero_index());
  const double r_last = norm(orbit.ell.front() - orbit.saddle) * 10.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i <= orbit.minus_index(); ++i) {
    if (norm(orbit.ell[i] - orbit.saddle) > r_last) break;
    lo = std::min(lo, -intA[i]);
    hi = std::max(hi, -intA[i]);
  }
  rep.backward_partial_spread = hi >= lo ? hi - lo : 0.0;
  rep.backward_partial_ok = rep.backward_partial_spread < 1e-3;
  return rep;
}

}  // namespace rankone
