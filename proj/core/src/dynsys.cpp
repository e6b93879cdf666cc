#include "rankone/dynsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rankone {

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::StepSizeUnderflow: return "step-size-underflow";
    case FailureKind::NoReturn: return "no-return";
    case FailureKind::LeftDomain: return "left-domain";
    case FailureKind::DegenerateCrossing: return "degenerate-crossing";
    case FailureKind::NotASaddle: return "not-a-saddle";
    case FailureKind::NewtonDivergence: return "newton-divergence";
    case FailureKind::NoLoop: return "no-loop";
    case FailureKind::DegenerateSample: return "degenerate-sample";
    case FailureKind::InsufficientTail: return "insufficient-tail";
    case FailureKind::WindowTooShort: return "window-too-short";
    case FailureKind::H2Violation: return "h2-violation";
    case FailureKind::SignError: return "sign-error";
    case FailureKind::ContinuationBroken: return "continuation-broken";
    case FailureKind::InvalidInput: return "invalid-input";
  }
  return "unknown";
}

namespace {

Mat2 fd_jacobian(const std::function<Vec2(Vec2)>& fn, Vec2 p) {
  const double hx = 1e-6 * std::max(1.0, std::abs(p.x));
  const double hy = 1e-6 * std::max(1.0, std::abs(p.y));
  const Vec2 dx = (fn({p.x + hx, p.y}) - fn({p.x - hx, p.y})) / (2.0 * hx);
  const Vec2 dy = (fn({p.x, p.y + hy}) - fn({p.x, p.y - hy})) / (2.0 * hy);
  return {dx.x, dy.x, dx.y, dy.y};
}

Vec2 fd_gradient(const std::function<double(Vec2)>& fn, Vec2 p) {
  const double hx = 1e-6 * std::max(1.0, std::abs(p.x));
  const double hy = 1e-6 * std::max(1.0, std::abs(p.y));
  return {(fn({p.x + hx, p.y}) - fn({p.x - hx, p.y})) / (2.0 * hx),
          (fn({p.x, p.y + hy}) - fn({p.x, p.y - hy})) / (2.0 * hy)};
}

}  // namespace

Vec2 VectorFieldSpec::velocity_with(Vec2 p, double mu_eff, double theta) const {
  Vec2 v{-alpha * p.x, beta * p.y};
  if (nonlinear) v += nonlinear(p);
  if (mu_eff != 0.0) {
    const double forcing = mu_eff * ((h && rho != 0.0 ? rho * h(p) : 0.0) + std::sin(theta));
    v.x -= forcing;
    v.y += forcing;
  }
  return v;
}

Vec2 VectorFieldSpec::velocity(Vec2 p, double theta) const { return velocity_with(p, mu, theta); }

Mat2 VectorFieldSpec::unforced_jacobian(Vec2 p) const {
  Mat2 j = Mat2::diag(-alpha, beta);
  if (nonlinear) j = j + (nonlinear_jacobian ? nonlinear_jacobian(p) : fd_jacobian(nonlinear, p));
  return j;
}

Mat2 VectorFieldSpec::jacobian(Vec2 p, double /*theta*/) const {
  Mat2 j = unforced_jacobian(p);
  if (mu != 0.0 && rho != 0.0 && h) {
    const Vec2 gh = h_gradient ? h_gradient(p) : fd_gradient(h, p);
    const double s = mu * rho;
    j.a11 -= s * gh.x;
    j.a12 -= s * gh.y;
    j.a21 += s * gh.x;
    j.a22 += s * gh.y;
  }
  return j;
}

void validate_normal_form(const VectorFieldSpec& field, double tol) {
  if (!(field.mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  if (!std::isfinite(field.omega)) throw std::invalid_argument("omega must be finite");
  if (!field.nonlinear) return;
  const Vec2 f0 = field.nonlinear({0.0, 0.0});
  if (std::abs(f0.x) > tol || std::abs(f0.y) > tol)
    throw std::invalid_argument("nonlinear part does not vanish at the origin");
  const Mat2 j = field.nonlinear_jacobian ? field.nonlinear_jacobian({0.0, 0.0})
                                          : fd_jacobian(field.nonlinear, {0.0, 0.0});
  if (std::max({std::abs(j.a11), std::abs(j.a12), std::abs(j.a21), std::abs(j.a22)}) > tol)
    throw std::invalid_argument("nonlinear part has nonzero first partials at the origin");
}

// ---------------------------------------------------------------------------
// Trajectory

void Trajectory::push_start(double t, Vec2 p) {
  times_.assign(1, t);
  points_.assign(1, p);
  steps_.clear();
}

void Trajectory::push_step(const Step& step, double t1, Vec2 p1) {
  steps_.push_back(step);
  times_.push_back(t1);
  points_.push_back(p1);
}

std::size_t Trajectory::locate(double t) const {
  if (steps_.empty()) return 0;
  if (forward()) {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return std::min(i, steps_.size() - 1);
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t, std::greater<>());
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(i, steps_.size() - 1);
}

Vec2 Trajectory::point_at(double t) const {
  if (steps_.empty()) return points_.front();
  const Step& st = steps_[locate(t)];
  const double s = (t - st.t0) / st.h;
  const double s1 = 1.0 - s;
  const auto& r = st.r;
  return r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])));
}

ExtendedState Trajectory::state_at(double t) const {
  const Vec2 p = point_at(t);
  return {p.x, p.y, theta_at(t)};
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with Shampine's dense output

namespace {

namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct AcceptedStep {
  double t0, h;
  State<N> y0, y1;
  std::array<State<N>, 5> r;
};

template <std::size_t N>
State<N> lincomb(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

/// Drives the stepper from t0 toward t1; `on_step` returns true to stop.
template <std::size_t N, class Rhs, class OnStep>
void drive(const Rhs& rhs, State<N> y, double t0, double t1, const IntegratorOptions& opts,
           OnStep&& on_step) {
  const double span = t1 - t0;
  if (span == 0.0) return;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double tol = opts.tol;
  const double h_max = opts.h_max > 0.0 ? opts.h_max : std::abs(span);

  State<N> k1 = rhs(t0, y);
  double h = opts.h_initial;
  if (h <= 0.0) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = tol + tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, h_max, 0.01 * std::abs(span) + 1e-12});
  }
  h = std::min(h, h_max);

  double t = t0;
  std::size_t steps = 0;
  bool last_rejected = false;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > opts.max_steps)
      throw NumericFailure(FailureKind::StepSizeUnderflow, "step budget exhausted",
                           {t, y[0], y[1]});
    double hs = dir * std::min(h, std::abs(t1 - t));
    if (std::abs(hs) < opts.h_min * std::max(1.0, std::abs(t)))
      throw NumericFailure(FailureKind::StepSizeUnderflow,
                           "step size underflow at t=" + std::to_string(t), {t, y[0], y[1]});

    using namespace dp;
    const State<N> k2 = rhs(t + c2 * hs, lincomb<N>(y, hs, {{a21, &k1}}));
    const State<N> k3 = rhs(t + c3 * hs, lincomb<N>(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State<N> k4 = rhs(t + c4 * hs, lincomb<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State<N> k5 =
        rhs(t + c5 * hs, lincomb<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State<N> k6 = rhs(
        t + hs, lincomb<N>(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State<N> y1 = lincomb<N>(
        y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State<N> k7 = rhs(t + hs, y1);

    double err = 0.0;
    bool finite = all_finite<N>(y1) && all_finite<N>(k7);
    if (finite) {
      for (std::size_t i = 0; i < N; ++i) {
        const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * k7[i]);
        const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y1[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / N);
      finite = std::isfinite(err);
    }
    if (!finite) {
      h = 0.25 * std::abs(hs);
      last_rejected = true;
      continue;
    }

    if (err <= 1.0) {
      AcceptedStep<N> st;
      st.t0 = t;
      st.h = hs;
      st.y0 = y;
      st.y1 = y1;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = hs * k1[i] - ydiff;
        st.r[0][i] = y[i];
        st.r[1][i] = ydiff;
        st.r[2][i] = bspl;
        st.r[3][i] = ydiff - hs * k7[i] - bspl;
        st.r[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                           d7 * k7[i]);
      }
      // Land exactly on t1 to avoid round-off drift in the last step.
      const bool final_step = std::abs(t1 - t) <= std::abs(hs);
      t = final_step ? t1 : t + hs;
      y = y1;
      k1 = k7;
      if (on_step(st)) return;
      double fac = err == 0.0 ? 10.0 : 0.9 * std::pow(err, -0.2);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
      h = std::min(std::abs(hs) * fac, h_max);
      last_rejected = false;
    } else {
      const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h = std::abs(hs) * fac;
      last_rejected = true;
    }
  }
}

template <std::size_t N>
Trajectory::Step planar_step(const AcceptedStep<N>& st) {
  Trajectory::Step s;
  s.t0 = st.t0;
  s.h = st.h;
  for (int j = 0; j < 5; ++j) s.r[j] = {st.r[j][0], st.r[j][1]};
  return s;
}

template <std::size_t N>
State<N> dense_eval(const AcceptedStep<N>& st, double t) {
  const double s = (t - st.t0) / st.h;
  const double s1 = 1.0 - s;
  State<N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = st.r[0][i] + s * (st.r[1][i] + s1 * (st.r[2][i] + s * (st.r[3][i] + s1 * st.r[4][i])));
  return out;
}

void check_tol(double tol) {
  if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("tolerance must lie in (0, 1e-3]");
}

}  // namespace

Trajectory integrate(const VectorFieldSpec& field, const ExtendedState& start, TimeSpan span,
                     const IntegratorOptions& opts) {
  check_tol(opts.tol);
  Trajectory traj(span.t0, start.theta, field.omega);
  traj.push_start(span.t0, start.point());
  auto rhs = [&](double t, const State<2>& y) {
    const Vec2 v = field.velocity({y[0], y[1]}, traj.phase_at(t));
    return State<2>{v.x, v.y};
  };
  drive<2>(rhs, State<2>{start.x, start.y}, span.t0, span.t1, opts,
           [&](const AcceptedStep<2>& st) {
             const double t1 = st.t0 + st.h;
             traj.push_step(planar_step(st), t1, {st.y1[0], st.y1[1]});
             return false;
           });
  return traj;
}

std::pair<Trajectory, TangentBlock> integrate_with_tangent(const VectorFieldSpec& field,
                                                           const ExtendedState& start,
                                                           TimeSpan span,
                                                           const IntegratorOptions& opts) {
  check_tol(opts.tol);
  Trajectory traj(span.t0, start.theta, field.omega);
  traj.push_start(span.t0, start.point());
  auto rhs = [&](double t, const State<7>& y) {
    const Vec2 p{y[0], y[1]};
    const double th = traj.phase_at(t);
    const Vec2 v = field.velocity(p, th);
    const Mat2 j = field.jacobian(p, th);
    const Mat2 m{y[2], y[3], y[4], y[5]};
    const Mat2 dm = j * m;
    return State<7>{v.x, v.y, dm.a11, dm.a12, dm.a21, dm.a22, j.trace()};
  };
  State<7> last{start.x, start.y, 1.0, 0.0, 0.0, 1.0, 0.0};
  drive<7>(rhs, last, span.t0, span.t1, opts, [&](const AcceptedStep<7>& st) {
    traj.push_step(planar_step(st), st.t0 + st.h, {st.y1[0], st.y1[1]});
    last = st.y1;
    return false;
  });
  TangentBlock tb;
  tb.jacobian_product = {last[2], last[3], last[4], last[5]};
  tb.divergence_integral = last[6];
  return {std::move(traj), tb};
}

Section Section::line(Vec2 anchor, Vec2 normal) {
  return {[anchor, normal](Vec2 p) { return dot(p - anchor, normal); },
          [normal](Vec2) { return normal; }};
}

Section Section::circle(double radius, Vec2 center) {
  return {[radius, center](Vec2 p) { return norm(p - center) - radius; },
          [center](Vec2 p) { return (p - center) / norm(p - center); }};
}

SectionHit integrate_to_section(const VectorFieldSpec& field, const ExtendedState& start,
                                const Section& section, const SectionOptions& opts) {
  check_tol(opts.integrator.tol);
  if (!section.g) throw std::invalid_argument("section condition missing");
  Trajectory traj(0.0, start.theta, field.omega);
  traj.push_start(0.0, start.point());
  auto rhs = [&](double t, const State<2>& y) {
    const Vec2 v = field.velocity({y[0], y[1]}, traj.phase_at(t));
    return State<2>{v.x, v.y};
  };
  auto grad = [&](Vec2 p) {
    return section.gradient ? section.gradient(p) : fd_gradient(section.g, p);
  };

  double g_prev = section.g(start.point());
  std::optional<SectionHit> hit;
  drive<2>(rhs, State<2>{start.x, start.y}, 0.0, opts.t_max, opts.integrator,
           [&](const AcceptedStep<2>& st) {
             const double t1 = st.t0 + st.h;
             const Vec2 p1{st.y1[0], st.y1[1]};
             traj.push_step(planar_step(st), t1, p1);
             if (opts.domain && !opts.domain(p1))
               throw NumericFailure(FailureKind::LeftDomain, "trajectory left the domain",
                                    {t1, p1.x, p1.y});
             const double g1 = section.g(p1);
             const double g0 = g_prev;
             g_prev = g1;
             if (g0 == 0.0) return false;  // start on the section: not a crossing
             const bool change = (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
             if (!change) return false;
             const int sense = g1 > g0 ? 1 : -1;
             if (opts.direction != 0 && sense != opts.direction) return false;

             // Safeguarded Newton on the dense output.
             double ta = st.t0, tb = t1;
             double ga = g0;
             double tc = ta + (tb - ta) * g0 / (g0 - g1);
             double phi = 0.0, dphi = 0.0;
             Vec2 pc;
             for (int it = 0; it < 200; ++it) {
               const auto yc = dense_eval<2>(st, tc);
               pc = {yc[0], yc[1]};
               phi = section.g(pc);
               dphi = dot(grad(pc), field.velocity(pc, traj.phase_at(tc)));
               if (std::abs(phi) < opts.residual_tol) break;
               if ((phi < 0.0) == (ga < 0.0)) {
                 ta = tc;
                 ga = phi;
               } else {
                 tb = tc;
               }
               double tn = dphi != 0.0 ? tc - phi / dphi : 0.5 * (ta + tb);
               const double lo = std::min(ta, tb), hi = std::max(ta, tb);
               if (!(tn > lo && tn < hi)) tn = 0.5 * (ta + tb);
               if (tn == tc || std::abs(tb - ta) <= 4 * std::numeric_limits<double>::epsilon() *
                                                          std::max(1.0, std::abs(tc)))
                 break;
               tc = tn;
             }
             if (std::abs(dphi) <= 1e-10)
               throw NumericFailure(FailureKind::DegenerateCrossing,
                                    "flow tangent to the section at the crossing",
                                    {tc, pc.x, pc.y, dphi});
             if (opts.accept && !opts.accept(pc, tc)) return false;
             hit = SectionHit{{pc.x, pc.y, traj.theta_at(tc)}, tc, Trajectory{}};
             return true;
           });
  if (!hit) {
    const ExtendedState last = traj.back();
    throw NumericFailure(FailureKind::NoReturn, "no section crossing before t_max",
                         {traj.t_end(), last.x, last.y});
  }
  hit->trajectory = std::move(traj);
  return std::move(*hit);
}

}  // namespace rankone
