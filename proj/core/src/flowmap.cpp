#include "rankone/flowmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"
#include "rankone/quadrature.hpp"

namespace rankone {

namespace {

void set_ranges(SectionPair& sp, double mu) {
  sp.mu = mu;
  const double m = (sp.K0hat + 1.0) * mu;
  sp.minus.z_lo = -m;
  sp.minus.z_hi = m;
  const double lo = 0.1 * sp.minus_rho_A * m * std::exp(0.5 * sp.beta * sp.L_plus);
  const double hi = 10.0 * sp.minus_rho_A * m * std::exp(2.0 * sp.beta * sp.L_plus);
  sp.plus.z_lo = std::min(lo, hi);
  sp.plus.z_hi = std::max(lo, hi);
}

SectionSpec section_at(const HomoclinicOrbit& orbit, std::size_t i, SectionKind kind) {
  SectionSpec sec;
  sec.kind = kind;
  sec.anchor_s = orbit.s[i];
  sec.base = orbit.ell[i];
  sec.tangent = orbit.tangent[i] / norm(orbit.tangent[i]);
  sec.normal = {sec.tangent.y, -sec.tangent.x};
  return sec;
}

double scaled(double z, double mu) { return mu > 0.0 ? z / mu : 0.0; }

}  // namespace

SectionPair SectionPair::with_mu(double m) const {
  SectionPair out = *this;
  set_ranges(out, m);
  return out;
}

SectionPair build_sections(const HomoclinicOrbit& orbit, double mu, const WaveCoefficients& waves,
                           double K0hat) {
  if (!orbit.connected || orbit.tangent.size() != orbit.size() || orbit.E.size() != orbit.size())
    throw NumericFailure(FailureKind::InvalidInput, "sections need a connected orbit with frames");
  if (!(mu >= 0.0) || !(K0hat >= 0.0)) throw std::invalid_argument("mu and K0hat must be non-negative");
  if (!(waves.K1 > 0.0) || !std::isfinite(waves.K1))
    throw NumericFailure(FailureKind::SignError, "-rho A must be positive", {waves.K1, waves.rho});

  SectionPair sp;
  sp.minus = section_at(orbit, orbit.minus_index(), SectionKind::SigmaMinus);
  sp.plus = section_at(orbit, orbit.plus_index(), SectionKind::SigmaPlus);
  sp.K0hat = K0hat;
  sp.L_plus = orbit.L_plus;
  sp.beta = orbit.beta;
  sp.epsilon = orbit.epsilon;
  sp.saddle = orbit.saddle;
  const auto cum = cumulative_piecewise(orbit.s, orbit.E, orbit.breaks, orbit.zero_index());
  sp.minus_rho_A = waves.K1 / std::exp(cum[orbit.plus_index()]);
  set_ranges(sp, mu);
  return sp;
}

PeriodicOrbit periodic_orbit(const VectorFieldSpec& field, Vec2 saddle, double tol, int max_iter) {
  if (!(field.omega > 0.0)) throw std::invalid_argument("periodic orbit needs omega > 0");
  const double T = kTwoPi / field.omega;
  IntegratorOptions io;
  io.tol = 1e-12;
  PeriodicOrbit po;
  Vec2 p = saddle;
  for (int it = 0; it < max_iter; ++it) {
    auto [traj, tb] = integrate_with_tangent(field, {p.x, p.y, 0.0}, {0.0, T}, io);
    const Vec2 F = traj.points().back() - p;
    po.residual = norm(F);
    po.iterations = it + 1;
    if (po.residual < tol) break;
    const Mat2 J = tb.jacobian_product - Mat2::identity();
    if (std::abs(J.det()) < 1e-14)
      throw NumericFailure(FailureKind::NewtonDivergence, "periodic orbit is not hyperbolic", {p.x, p.y});
    p = p - solve(J, F);
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw NumericFailure(FailureKind::NewtonDivergence, "shooting diverged");
  }
  if (po.residual >= tol * 1e3)
    throw NumericFailure(FailureKind::NewtonDivergence, "shooting did not converge", {po.residual});
  po.start = p;
  const Trajectory traj = integrate(field, {p.x, p.y, 0.0}, {0.0, T}, io);
  const int n = 128;
  for (int i = 0; i < n; ++i) {
    const Vec2 q = traj.point_at(T * i / n);
    po.samples.push_back(q);
    po.max_deviation = std::max(po.max_deviation, norm(q - saddle));
  }
  return po;
}

double estimate_K0hat(const VectorFieldSpec& field, Vec2 saddle, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("K0hat needs mu > 0");
  return periodic_orbit(field.with_mu(mu), saddle).max_deviation / mu;
}

std::string_view to_string(ReturnStatus s) {
  switch (s) {
    case ReturnStatus::Ok: return "ok";
    case ReturnStatus::OutsidePlusRange: return "outside-plus-range";
    case ReturnStatus::NoReturnOuter: return "no-return-outer";
    case ReturnStatus::NoReturnInner: return "no-return-inner";
  }
  return "unknown";
}

ReturnSample return_map_flow(const VectorFieldSpec& field, const SectionPair& sp, double Z0,
                             double theta0, const FlowOptions& opts) {
  ReturnSample rs;
  rs.Z0 = Z0;
  rs.theta0 = theta0;
  rs.mu = field.mu;
  const double mu = field.mu;
  const double eps = sp.epsilon;

  SectionOptions outer;
  outer.direction = +1;
  outer.integrator.tol = opts.tol;
  outer.t_max = opts.t_max_outer > 0.0 ? opts.t_max_outer
                                       : 4.0 * (sp.plus.anchor_s - sp.minus.anchor_s) + 20.0;
  const Vec2 plus_base = sp.plus.base;
  const double reach = opts.capture * eps;
  outer.accept = [plus_base, reach](Vec2 p, double) { return norm(p - plus_base) < reach; };

  const Vec2 start = sp.minus.point(mu * Z0);
  SectionHit hit;
  try {
    hit = integrate_to_section(field, {start.x, start.y, wrap_angle(theta0)}, sp.plus.section(), outer);
  } catch (const NumericFailure&) {
    rs.status = ReturnStatus::NoReturnOuter;
    return rs;
  }
  rs.reached_plus = true;
  rs.t_M = hit.time;
  const double z_plus = sp.plus.chart(hit.state.point());
  rs.Z_hat = scaled(z_plus, mu);
  rs.theta_hat = theta0 + field.omega * rs.t_M;
  rs.in_plus_range = sp.plus.contains(z_plus) && mu > 0.0;
  if (!rs.in_plus_range) rs.status = ReturnStatus::OutsidePlusRange;

  SectionOptions inner;
  inner.direction = +1;
  inner.integrator.tol = opts.tol;
  const double beta = sp.beta > 0.0 ? sp.beta : field.beta;
  inner.t_max = opts.t_max_inner > 0.0 ? opts.t_max_inner
                : mu > 0.0           ? (4.0 * std::log(1.0 / mu) + 40.0) / beta
                                     : 10.0 / beta;
  const Vec2 minus_base = sp.minus.base;
  inner.accept = [minus_base, reach](Vec2 p, double) { return norm(p - minus_base) < reach; };
  const Vec2 c = sp.saddle;
  const double box = 2.0 * eps + reach;
  inner.domain = [c, box](Vec2 p) { return norm(p - c) < box; };
  try {
    const SectionHit back = integrate_to_section(field, hit.state, sp.minus.section(), inner);
    rs.t_N = back.time;
    const double z_minus = sp.minus.chart(back.state.point());
    rs.Z1 = scaled(z_minus, mu);
    rs.theta1 = rs.theta_hat + field.omega * rs.t_N;
    rs.returned = true;
    rs.in_minus_range = sp.minus.contains(z_minus) && mu > 0.0;
  } catch (const NumericFailure&) {
    if (rs.status == ReturnStatus::Ok) rs.status = ReturnStatus::NoReturnInner;
  }
  return rs;
}

std::vector<ReturnSample> return_map_grid(const VectorFieldSpec& field, const SectionPair& sp,
                                          const std::vector<double>& Z0s,
                                          const std::vector<double>& thetas,
                                          const FlowOptions& opts, unsigned threads) {
  std::vector<ReturnSample> out(Z0s.size() * thetas.size());
  detail::parallel_chunks(out.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i)
      out[i] = return_map_flow(field, sp, Z0s[i / thetas.size()], thetas[i % thetas.size()], opts);
  });
  return out;
}

double return_map_determinant(const VectorFieldSpec& field, const SectionPair& sp, double Z0,
                              double theta0, double h, const FlowOptions& opts) {
  auto eval = [&](double z, double t) {
    const ReturnSample r = return_map_flow(field, sp, z, t, opts);
    if (!r.returned)
      throw NumericFailure(FailureKind::NoReturn, "return map undefined near the sample", {z, t});
    return Vec2{r.Z1, r.theta1};
  };
  const Vec2 dz = (eval(Z0 + h, theta0) - eval(Z0 - h, theta0)) / (2 * h);
  const Vec2 dt = (eval(Z0, theta0 + h) - eval(Z0, theta0 - h)) / (2 * h);
  return dz.x * dt.y - dt.x * dz.y;
}

PredictionWindow window_of(const HomoclinicOrbit& orbit, double omega) {
  return {orbit.L_minus, orbit.L_plus, orbit.epsilon, orbit.alpha, orbit.beta, omega};
}

Prediction analytic_prediction(double X0, double theta0, double mu, const WaveCoefficients& w,
                               const PredictionWindow& win) {
  if (!(mu > 0.0)) throw std::invalid_argument("prediction needs mu > 0");
  Prediction p;
  p.Z_hat = w.K1 * (1.0 + w.c1 * std::sin(theta0) + w.c2 * std::cos(theta0)) + w.P_L * X0;
  if (!(p.Z_hat > 0.0))
    throw NumericFailure(FailureKind::SignError, "predicted image leaves the oscillation band",
                         {X0, theta0, p.Z_hat});
  p.theta_hat = theta0 + win.omega * (win.L_plus + win.L_minus);
  const double r = win.alpha / win.beta;
  p.X1 = std::pow(mu / win.epsilon, r - 1.0) * std::pow(p.Z_hat, r);
  p.theta1 = p.theta_hat + (win.omega / win.beta) * std::log(win.epsilon / (mu * p.Z_hat));
  return p;
}

MStageReport m_stage_check(const VectorFieldSpec& field, const SectionPair& sp,
                           const WaveCoefficients& waves, const PredictionWindow& w,
                           const std::vector<double>& Z0s, const std::vector<double>& thetas,
                           double band, const FlowOptions& opts, unsigned threads) {
  MStageReport rep;
  rep.band = band;
  rep.samples = return_map_grid(field, sp, Z0s, thetas, opts, threads);
  rep.all_in_plus_range = true;
  rep.all_returned = true;
  for (const ReturnSample& s : rep.samples) {
    const Prediction p = analytic_prediction(s.Z0, s.theta0, field.mu, waves, w);
    rep.predictions.push_back(p);
    if (!s.reached_plus) {
      rep.all_returned = false;
      rep.all_in_plus_range = false;
      rep.max_relative_error = std::numeric_limits<double>::infinity();
      continue;
    }
    rep.all_in_plus_range = rep.all_in_plus_range && s.in_plus_range;
    rep.max_relative_error = std::max(rep.max_relative_error, std::abs(s.Z_hat - p.Z_hat) / p.Z_hat);
    rep.max_phase_error = std::max(rep.max_phase_error, std::abs(wrap_pi(s.theta_hat - p.theta_hat)));
  }
  return rep;
}

PassageReport passage_time_check(const VectorFieldSpec& field, const SectionPair& sp,
                                 const std::vector<double>& mu_grid, double Z0, double theta0,
                                 const FlowOptions& opts) {
  if (mu_grid.size() < 5) throw NumericFailure(FailureKind::InvalidInput, "need at least 5 values of mu");
  const auto [mn, mx] = std::minmax_element(mu_grid.begin(), mu_grid.end());
  if (!(*mn > 0.0) || std::log10(*mx / *mn) < 3.0 - 1e-9)
    throw NumericFailure(FailureKind::InvalidInput, "mu values must be positive and span 3 decades");

  PassageReport rep;
  std::vector<double> L;
  for (double m : mu_grid) {
    const ReturnSample r = return_map_flow(field.with_mu(m), sp.with_mu(m), Z0, theta0, opts);
    if (!r.returned) throw NumericFailure(FailureKind::NoReturn, "no return for passage timing", {m});
    rep.mu.push_back(m);
    rep.t_N.push_back(r.t_N);
    rep.t_M.push_back(r.t_M);
    L.push_back(std::log(1.0 / m));
  }
  const std::size_t n = L.size();
  double mL = 0, mT = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mL += L[i];
    mT += rep.t_N[i];
  }
  mL /= n;
  mT /= n;
  double sLL = 0, sLT = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sLL += (L[i] - mL) * (L[i] - mL);
    sLT += (L[i] - mL) * (rep.t_N[i] - mT);
  }
  rep.slope = sLT / sLL;
  rep.intercept = mT - rep.slope * mL;
  rep.K4 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double res = rep.t_N[i] - (rep.intercept + rep.slope * L[i]);
    rep.residual.push_back(res);
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(res));
    rep.K4 = std::min(rep.K4, rep.t_N[i] / L[i]);
    rep.K5 = std::max(rep.K5, rep.t_N[i] / L[i]);
    rep.max_escape_product = std::max(rep.max_escape_product, std::exp(L[i] - field.alpha * rep.t_N[i]));
  }
  // residuals against a centred quadratic in L
  double s2 = 0, s2r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = (L[i] - mL) * (L[i] - mL) - sLL / n;
    s2 += q * q;
    s2r += q * rep.residual[i];
  }
  const double range = L[std::distance(mu_grid.begin(), mn)] - L[std::distance(mu_grid.begin(), mx)];
  rep.curvature = s2 > 0 ? (s2r / s2) * range * range * field.beta : 0.0;
  rep.slope_ok = std::abs(rep.slope * field.beta - 1.0) < 0.01;
  rep.trend_flag = std::abs(rep.curvature) > 0.05;
  rep.escape_ok = rep.max_escape_product < 1.0;
  return rep;
}

}  // namespace rankone
