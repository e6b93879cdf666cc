#include "rankone/rank_one.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"
#include "rankone/errors.hpp"

namespace rankone {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Stencil {
  std::vector<int> offset;
  std::vector<double> weight;
};

const Stencil& stencil(int order) {
  static const Stencil s0{{0}, {1.0}};
  static const Stencil s1{{-1, 1}, {-0.5, 0.5}};
  static const Stencil s2{{-1, 0, 1}, {1.0, -2.0, 1.0}};
  static const Stencil s3{{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}};
  switch (order) {
    case 0: return s0;
    case 1: return s1;
    case 2: return s2;
    default: return s3;
  }
}

double relative_step(int total_order) {
  switch (total_order) {
    case 1: return 1e-5;
    case 2: return 1e-4;
    default: return 1e-3;
  }
}

std::vector<DerivOrder> multi_indices(int max_order) {
  std::vector<DerivOrder> out;
  for (int total = 0; total <= max_order; ++total)
    for (int i = total; i >= 0; --i)
      for (int j = total - i; j >= 0; --j) out.push_back({i, j, total - i - j});
  return out;
}

double midpoint(double lo, double hi, int i, int n) { return lo + (i + 0.5) * (hi - lo) / n; }

struct Diff {
  double x = 0.0;
  double t = 0.0;
  double scale = 0.0;  // magnitude of the lifted values, for round-off estimates
};

Diff discrepancy(const Family2D& fam, double a, double b, double X, double theta) {
  const ASState out = fam.map(a, b, {X, theta});
  const double s = fam.singular(a, X, theta);
  return {out.X, out.theta - s, std::abs(out.theta) + std::abs(s) + std::abs(out.X)};
}

struct PartialValue {
  std::array<double, 2> value{};
  double floor_scale = 0.0;  // sum |w| * |F|, to be divided by the step product
};

PartialValue apply_stencil(const Family2D& fam, double b, const std::array<double, 3>& at,
                           const DerivOrder& ord, const std::array<double, 3>& h) {
  PartialValue pv;
  const Stencil& sa = stencil(ord[0]);
  const Stencil& sx = stencil(ord[1]);
  const Stencil& st = stencil(ord[2]);
  for (std::size_t i = 0; i < sa.offset.size(); ++i)
    for (std::size_t j = 0; j < sx.offset.size(); ++j)
      for (std::size_t k = 0; k < st.offset.size(); ++k) {
        const double w = sa.weight[i] * sx.weight[j] * st.weight[k];
        const Diff d = discrepancy(fam, at[0] + sa.offset[i] * h[0], b, at[1] + sx.offset[j] * h[1],
                                   at[2] + st.offset[k] * h[2]);
        pv.value[0] += w * d.x;
        pv.value[1] += w * d.t;
        pv.floor_scale += std::abs(w) * d.scale;
      }
  double denom = 1.0;
  for (int c = 0; c < 3; ++c) denom *= std::pow(h[c], ord[c]);
  pv.value[0] /= denom;
  pv.value[1] /= denom;
  pv.floor_scale = 4.0 * kEps * pv.floor_scale / denom;
  return pv;
}

std::array<double, 3> scales(const Family2D& fam) {
  return {std::max(fam.a_hi - fam.a_lo, 1.0), std::max(fam.X_hi - fam.X_lo, 1.0), kTwoPi};
}

void log_log_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope) {
  const std::size_t n = x.size();
  if (n < 2) return;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx > 0) slope = sxy / sxx;
}

C1Row c1_row(const Family2D& fam, double b, const std::vector<DerivOrder>& orders,
             const GridSpec& g) {
  C1Row row;
  row.b = b;
  const std::size_t m = orders.size();
  row.sup.assign(m, {0.0, 0.0});
  row.noise_floor.assign(m, {0.0, 0.0});
  if (b == 0.0) return row;

  const std::array<double, 3> sc = scales(fam);
  const std::size_t total = static_cast<std::size_t>(g.a_points) * g.X_points * g.theta_points;
  const unsigned nt = std::max(1u, std::min<unsigned>(detail::resolve_threads(g.threads), 64u));
  std::vector<C1Row> partial(nt, row);

  detail::parallel_chunks(total, nt, [&](std::size_t lo, std::size_t hi, unsigned tid) {
    C1Row& r = partial[tid];
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const int it = static_cast<int>(idx % g.theta_points);
      const int ix = static_cast<int>((idx / g.theta_points) % g.X_points);
      const int ia = static_cast<int>(idx / (static_cast<std::size_t>(g.theta_points) * g.X_points));
      const std::array<double, 3> at{fam.a_lo + ia * (fam.a_hi - fam.a_lo) / g.a_points,
                                     midpoint(fam.X_lo, fam.X_hi, ix, g.X_points),
                                     it * kTwoPi / g.theta_points};
      for (std::size_t q = 0; q < m; ++q) {
        const DerivOrder& ord = orders[q];
        const int tot = ord[0] + ord[1] + ord[2];
        if (tot == 0) {
          const Diff d = discrepancy(fam, at[0], b, at[1], at[2]);
          r.sup[q][0] = std::max(r.sup[q][0], std::abs(d.x));
          r.sup[q][1] = std::max(r.sup[q][1], std::abs(wrap_pi(d.t)));
          r.noise_floor[q][0] = std::max(r.noise_floor[q][0], 4.0 * kEps * std::abs(d.x));
          r.noise_floor[q][1] = std::max(r.noise_floor[q][1], 4.0 * kEps * d.scale);
          continue;
        }
        std::array<double, 3> h{};
        for (int c = 0; c < 3; ++c) h[c] = relative_step(tot) * sc[c];
        auto half = [](std::array<double, 3> v) {
          for (double& x : v) x *= 0.5;
          return v;
        };
        const auto h2 = half(h), h4 = half(h2);
        const PartialValue p1 = apply_stencil(fam, b, at, ord, h);
        const PartialValue p2 = apply_stencil(fam, b, at, ord, h2);
        const PartialValue p4 = apply_stencil(fam, b, at, ord, h4);
        for (int c = 0; c < 2; ++c) {
          const double r1 = (4.0 * p2.value[c] - p1.value[c]) / 3.0;
          const double r2 = (4.0 * p4.value[c] - p2.value[c]) / 3.0;
          const double fl = 2.0 * p2.floor_scale;
          r.sup[q][c] = std::max(r.sup[q][c], std::abs(r1));
          r.noise_floor[q][c] = std::max(r.noise_floor[q][c], fl);
          // step-halving stability, only where the finest level is clear of round-off
          if (std::abs(r2) > 100.0 * 2.0 * p4.floor_scale)
            r.richardson_change = std::max(r.richardson_change, std::abs(r1 - r2) / std::abs(r2));
        }
      }
    }
  });
  for (const C1Row& r : partial) {
    for (std::size_t q = 0; q < m; ++q)
      for (int c = 0; c < 2; ++c) {
        row.sup[q][c] = std::max(row.sup[q][c], r.sup[q][c]);
        row.noise_floor[q][c] = std::max(row.noise_floor[q][c], r.noise_floor[q][c]);
      }
    row.richardson_change = std::max(row.richardson_change, r.richardson_change);
  }
  return row;
}

CircleMap fd_circle(const Family2D& fam, double a) {
  auto f = [fam, a](double t) { return fam.singular(a, 0.0, t); };
  CircleMap m;
  m.f = f;
  m.df = [f](double t) {
    const double h = 1e-5;
    return (f(t + h) - f(t - h)) / (2 * h);
  };
  m.d2f = [f](double t) {
    const double h = 1e-4;
    return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
  };
  m.d3f = [f](double t) {
    const double h = 1e-3;
    return (f(t + 2 * h) - 2 * f(t + h) + 2 * f(t - h) - f(t - 2 * h)) / (2 * h * h * h);
  };
  m.name = "singular-limit";
  return m;
}

}  // namespace

Family2D as_family(const ASParams& p, const std::vector<int>& n_values) {
  p.validate();
  Family2D fam;
  fam.name = "as-model";
  fam.map = [p](double a, double b, const ASState& s) { return family_map_lifted(p, a, b, s); };
  fam.singular = [p](double a, double X, double t) { return singular_theta(p, a, X, t); };
  fam.log_abs_det = [p](double a, double b, const ASState& s) {
    return log_det_F(s, p.with_mu(family_mu(p, a, b)));
  };
  fam.singular_dX = [p](double, double X, double t) {
    return -p.frequency_ratio() * p.lambda / (p.lambda * X + p.B * (1.0 + p.A_amp * std::sin(t)));
  };
  fam.circle = [p](double a) { return circle_map(p, a); };
  fam.a_lo = 0.0;
  fam.a_hi = kTwoPi;
  fam.X_lo = 0.0;
  fam.X_hi = p.x_domain();
  for (int n : n_values) fam.b_values.push_back(reparametrize(p, n, 0.0).b_n);
  std::sort(fam.b_values.begin(), fam.b_values.end(), std::greater<>());
  return fam;
}

Mat2 fd_jacobian(const Family2D& fam, double a, double b, const ASState& s) {
  const auto sc = scales(fam);
  auto column = [&](int which, double h) {
    ASState plus = s, minus = s;
    (which == 0 ? plus.X : plus.theta) += h;
    (which == 0 ? minus.X : minus.theta) -= h;
    const ASState fp = fam.map(a, b, plus), fm = fam.map(a, b, minus);
    return Vec2{(fp.X - fm.X) / (2 * h), (fp.theta - fm.theta) / (2 * h)};
  };
  auto rich = [&](int which) {
    const double h = 1e-5 * sc[which == 0 ? 1 : 2];
    const Vec2 c1 = column(which, h), c2 = column(which, 0.5 * h);
    return (4.0 * c2 - c1) / 3.0;
  };
  const Vec2 cx = rich(0), ct = rich(1);
  return {cx.x, ct.x, cx.y, ct.y};
}

C1Report c1_check(const Family2D& fam, const GridSpec& grid, int max_order) {
  if (!fam.map || !fam.singular) throw NumericFailure(FailureKind::InvalidInput, "family needs map and singular limit");
  if (fam.b_values.size() < 4) throw NumericFailure(FailureKind::InvalidInput, "c1_check needs at least 4 values of b");
  if (max_order < 0 || max_order > 3) throw std::invalid_argument("derivative order must lie in [0, 3]");
  if (grid.a_points < 1 || grid.X_points < 1 || grid.theta_points < 1) throw std::invalid_argument("empty grid");

  C1Report rep;
  rep.orders = multi_indices(max_order);
  std::vector<double> bs = fam.b_values;
  std::sort(bs.begin(), bs.end(), std::greater<>());
  for (double b : bs) {
    if (b < 0.0) throw std::invalid_argument("b values must be non-negative");
    rep.rows.push_back(c1_row(fam, b, rep.orders, grid));
  }

  rep.monotone = true;
  for (std::size_t i = 0; i + 1 < rep.rows.size() && rep.monotone; ++i) {
    const C1Row& big = rep.rows[i];
    const C1Row& small = rep.rows[i + 1];
    for (std::size_t q = 0; q < rep.orders.size() && rep.monotone; ++q)
      for (int c = 0; c < 2; ++c) {
        const double v = small.sup[q][c];
        if (v > std::max(big.sup[q][c] * (1.0 + 1e-9), small.noise_floor[q][c])) {
          rep.monotone = false;
          rep.witness_b_large = big.b;
          rep.witness_b_small = small.b;
          rep.witness_order = static_cast<int>(q);
          rep.witness_component = c;
          break;
        }
      }
  }

  std::vector<double> bx, vx, bt, vt;
  for (const C1Row& r : rep.rows) {
    if (r.b <= 0.0) continue;
    if (r.sup[0][0] > r.noise_floor[0][0] && r.sup[0][0] > 0.0) {
      bx.push_back(r.b);
      vx.push_back(r.sup[0][0]);
    }
    if (r.sup[0][1] > r.noise_floor[0][1] && r.sup[0][1] > 0.0) {
      bt.push_back(r.b);
      vt.push_back(r.sup[0][1]);
    }
  }
  log_log_fit(bx, vx, rep.exponent_X);
  log_log_fit(bt, vt, rep.exponent_theta);
  return rep;
}

C3Report c3_check(const Family2D& fam, const std::vector<double>& a_samples, double tol) {
  if (!fam.singular) throw NumericFailure(FailureKind::InvalidInput, "family needs a singular limit");
  C3Report rep;
  rep.min_abs_derivative = std::numeric_limits<double>::infinity();
  const double hx = 1e-5 * std::max(fam.X_hi - fam.X_lo, 1.0);
  for (double a : a_samples) {
    const CircleMap cm = fam.circle ? fam.circle(a) : fd_circle(fam, a);
    for (const CriticalPoint& cp : critical_set(cm)) {
      auto cd = [&](double h) {
        return (fam.singular(a, fam.X_lo + h, cp.theta) - fam.singular(a, fam.X_lo - h, cp.theta)) / (2 * h);
      };
      const double d = (4.0 * cd(0.5 * hx) - cd(hx)) / 3.0;
      if (fam.singular_dX) {
        const double exact = fam.singular_dX(a, fam.X_lo, cp.theta);
        const double err = std::abs(d - exact) / std::max(std::abs(exact), 1.0);
        rep.max_fd_error = std::max(rep.max_fd_error, err);
      }
      ++rep.points_checked;
      if (std::abs(d) < rep.min_abs_derivative) {
        rep.min_abs_derivative = std::abs(d);
        rep.witness_a = a;
        rep.witness_theta = cp.theta;
      }
    }
  }
  if (rep.points_checked == 0) rep.min_abs_derivative = 0.0;
  rep.pass = rep.points_checked == 0 || rep.min_abs_derivative > tol;
  return rep;
}

C4Report c4_distortion(const Family2D& fam, const GridSpec& g, double bound) {
  if (!fam.map) throw NumericFailure(FailureKind::InvalidInput, "family needs a map");
  if (fam.b_values.empty()) throw NumericFailure(FailureKind::InvalidInput, "no b values");
  C4Report rep;
  rep.bound = bound;
  const std::size_t cells = static_cast<std::size_t>(g.X_points) * g.theta_points;
  const unsigned nt = std::max(1u, std::min<unsigned>(detail::resolve_threads(g.threads), 64u));
  const double inf = std::numeric_limits<double>::infinity();

  for (double b : fam.b_values) {
    if (!(b > 0.0)) throw NumericFailure(FailureKind::InvalidInput, "distortion needs b > 0", {b});
    C4Row row;
    row.b = b;
    row.ratio = 0.0;
    for (int ia = 0; ia < g.a_points; ++ia) {
      const double a = fam.a_lo + ia * (fam.a_hi - fam.a_lo) / g.a_points;
      std::vector<double> lmax(nt, -inf), lmin(nt, inf), fderr(nt, 0.0);
      detail::parallel_chunks(cells, nt, [&](std::size_t lo, std::size_t hi, unsigned tid) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
          const ASState s{midpoint(fam.X_lo, fam.X_hi, static_cast<int>(idx / g.theta_points), g.X_points),
                          static_cast<double>(idx % g.theta_points) * kTwoPi / g.theta_points};
          const double fd = log_abs_det(fd_jacobian(fam, a, b, s));
          double v = fd;
          if (fam.log_abs_det) {
            v = fam.log_abs_det(a, b, s);
            if (std::isfinite(v) && std::isfinite(fd)) fderr[tid] = std::max(fderr[tid], std::abs(v - fd));
          }
          if (std::isnan(v)) v = -inf;
          lmax[tid] = std::max(lmax[tid], v);
          lmin[tid] = std::min(lmin[tid], v);
        }
      });
      const double hi = *std::max_element(lmax.begin(), lmax.end());
      const double lo = *std::min_element(lmin.begin(), lmin.end());
      rep.max_fd_log_error = std::max(rep.max_fd_log_error, *std::max_element(fderr.begin(), fderr.end()));
      const double ratio = std::isfinite(lo) && std::isfinite(hi) ? std::exp(hi - lo) : inf;
      if (ia == 0 || ratio > row.ratio) {
        row.ratio = ratio;
        row.log_max = hi;
        row.log_min = lo;
        row.worst_a = a;
      }
    }
    rep.rows.push_back(row);
  }

  double rmin = inf;
  rep.max_ratio = 0.0;
  for (const C4Row& r : rep.rows) {
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    rmin = std::min(rmin, r.ratio);
  }
  rep.ratio_spread = std::isfinite(rep.max_ratio) && rmin > 0 ? rep.max_ratio / rmin - 1.0 : inf;
  rep.pass = rep.max_ratio < bound;
  return rep;
}

}  // namespace rankone
