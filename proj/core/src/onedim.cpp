#include "rankone/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"
#include "rankone/errors.hpp"
#include "rankone/linalg.hpp"

namespace rankone {

double CircleMap::operator()(double theta) const { return wrap_angle(f(theta)); }

namespace {

double refine_root(const std::function<double(double)>& g, const std::function<double(double)>& dg,
                   double a, double b, double tol) {
  double ga = g(a);
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double gx = g(x);
    if (std::abs(gx) < tol) return x;
    if ((gx < 0.0) == (ga < 0.0)) {
      a = x;
      ga = gx;
    } else {
      b = x;
    }
    double xn = dg ? x - gx / dg(x) : 0.5 * (a + b);
    if (!(xn > std::min(a, b) && xn < std::max(a, b))) xn = 0.5 * (a + b);
    if (std::abs(b - a) < 1e-16) return xn;
    x = xn;
  }
  return x;
}

}  // namespace

std::vector<CriticalPoint> critical_set(const CircleMap& map, int grid_size, double tol) {
  if (grid_size < 1024) throw std::invalid_argument("critical-set grid must have at least 1024 points");
  std::vector<CriticalPoint> out;
  const double h = kTwoPi / grid_size;
  double prev = map.df(0.0);
  for (int i = 1; i <= grid_size; ++i) {
    const double t = i * h;
    const double cur = map.df(t);
    if ((prev < 0.0) != (cur < 0.0)) {
      const double root = refine_root(map.df, map.d2f, t - h, t, tol);
      CriticalPoint cp;
      cp.theta = wrap_angle(root);
      cp.d2f = map.d2f ? map.d2f(root) : 0.0;
      cp.degenerate = std::abs(cp.d2f) < 1e-8;
      out.push_back(cp);
    }
    prev = cur;
  }
  std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.theta < y.theta; });
  return out;
}

std::vector<double> critical_angles(const std::vector<CriticalPoint>& cps) {
  std::vector<double> out;
  for (const auto& c : cps) out.push_back(c.theta);
  return out;
}

double default_delta0(const std::vector<double>& critical) {
  if (critical.empty()) return 0.0;
  if (critical.size() == 1) return 0.1 * kTwoPi;
  std::vector<double> c = critical;
  std::sort(c.begin(), c.end());
  double gap = kTwoPi - (c.back() - c.front());
  for (std::size_t i = 1; i < c.size(); ++i) gap = std::min(gap, c[i] - c[i - 1]);
  return 0.1 * gap;
}

namespace {

struct Context {
  const CircleMap& map;
  std::vector<double> crit;
  double delta0;

  double dist_to_C(double x) const {
    double d = std::numeric_limits<double>::infinity();
    for (double c : crit) d = std::min(d, circle_distance(x, c));
    return d;
  }
  bool inside(double x) const { return !crit.empty() && dist_to_C(x) < delta0; }
};

std::vector<double> build_grid(const std::vector<double>& crit, const MisiurewiczOptions& o) {
  const std::size_t n = std::size_t{1} << o.grid_log2;
  std::vector<double> g;
  g.reserve(n + crit.size() * static_cast<std::size_t>(o.refine) * 2048);
  const double h = kTwoPi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) g.push_back(h * static_cast<double>(i));
  const double hr = h / o.refine;
  const auto m = static_cast<long>(std::floor(o.refine_width / hr));
  for (double c : crit)
    for (long k = -m; k <= m; ++k) g.push_back(wrap_angle(c + hr * static_cast<double>(k) + 0.5 * hr));
  return g;
}

struct StartResult {
  double min_avg = std::numeric_limits<double>::infinity();
  int min_len = 0;
  int entry_len = 0;  // 0: never entered
  double entry_sum = 0.0;
};

StartResult scan_start(const Context& ctx, double x, int horizon, int M0) {
  StartResult r;
  if (ctx.inside(x)) return r;
  double s = 0.0;
  for (int k = 0; k < horizon; ++k) {
    s += std::log(std::abs(ctx.map.df(x)));
    x = ctx.map(x);
    const int n = k + 1;
    if (ctx.inside(x)) {
      r.entry_len = n;
      r.entry_sum = s;
      return r;
    }
    if (n >= M0 && s / n < r.min_avg) {
      r.min_avg = s / n;
      r.min_len = n;
    }
  }
  return r;
}

void fill_expansion(MisiurewiczReport& rep, const Context& ctx, const std::vector<double>& grid,
                    int horizon, const MisiurewiczOptions& o) {
  std::vector<StartResult> res(grid.size());
  detail::parallel_chunks(grid.size(), o.threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) res[i] = scan_start(ctx, grid[i], horizon, o.M0);
  });
  double lam = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < res.size(); ++i)
    if (res[i].min_len > 0 && res[i].min_avg < lam) {
      lam = res[i].min_avg;
      arg = i;
    }
  rep.M0 = o.M0;
  if (std::isfinite(lam)) {
    rep.lambda0 = lam;
    rep.lambda0_witness_start = grid[arg];
    rep.lambda0_witness_length = res[arg].min_len;
    rep.cond1a = lam > 0.0;
  } else {
    rep.lambda0 = std::numeric_limits<double>::quiet_NaN();
    rep.cond1a = false;
  }
  double logc = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (res[i].entry_len == 0 || !std::isfinite(lam)) continue;
    const double v = res[i].entry_sum - lam * res[i].entry_len;
    if (v < logc) {
      logc = v;
      rep.c0_witness_start = grid[i];
    }
  }
  rep.c0 = std::exp(logc);
  rep.cond1b = rep.cond1a && rep.c0 > 0.0 && std::isfinite(logc);
}

Context make_context(const CircleMap& map, double& delta0) {
  Context ctx{map, critical_angles(critical_set(map)), delta0};
  if (delta0 <= 0.0) delta0 = default_delta0(ctx.crit);
  ctx.delta0 = delta0;
  if (!ctx.crit.empty() && 2.0 * delta0 * static_cast<double>(ctx.crit.size()) >= kTwoPi)
    throw std::invalid_argument("critical neighborhood covers the whole circle");
  return ctx;
}

}  // namespace

MisiurewiczReport expansion_estimate(const CircleMap& map, double delta0, int horizon,
                                     const MisiurewiczOptions& opts) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  const Context ctx = make_context(map, delta0);
  MisiurewiczReport rep;
  rep.horizon = horizon;
  rep.delta0 = delta0;
  rep.critical_points = ctx.crit;
  fill_expansion(rep, ctx, build_grid(ctx.crit, opts), horizon, opts);
  return rep;
}

MisiurewiczReport verify_misiurewicz(const CircleMap& map, double delta0, int horizon,
                                     const MisiurewiczOptions& opts) {
  if (horizon < 50) throw std::invalid_argument("Misiurewicz horizon must be at least 50");
  const Context ctx = make_context(map, delta0);
  MisiurewiczReport rep;
  rep.horizon = horizon;
  rep.delta0 = delta0;
  rep.critical_points = ctx.crit;
  const auto grid = build_grid(ctx.crit, opts);
  fill_expansion(rep, ctx, grid, horizon, opts);

  // (2a) curvature inside the critical neighborhood.
  rep.min_abs_d2f = std::numeric_limits<double>::infinity();
  for (double x : grid) {
    if (!ctx.inside(x)) continue;
    const double v = std::abs(map.d2f(x));
    if (v < rep.min_abs_d2f) {
      rep.min_abs_d2f = v;
      rep.cond2a_witness = x;
    }
  }
  rep.cond2a = ctx.crit.empty() || rep.min_abs_d2f > 1e-8;

  // (2b) critical orbits stay delta0 away from C, with landing on repelling cycles detected.
  rep.cond2b = true;
  rep.cond2b_min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < ctx.crit.size(); ++ci) {
    std::vector<double> orbit;
    double x = ctx.crit[ci];
    int landed = 0;
    bool failed = false;
    for (int k = 1; k <= horizon && !failed && landed == 0; ++k) {
      x = map(x);
      orbit.push_back(x);
      const double d = ctx.dist_to_C(x);
      rep.cond2b_min_distance = std::min(rep.cond2b_min_distance, d);
      if (d < delta0) {
        failed = true;
        if (rep.cond2b) {
          rep.cond2b_witness_point = static_cast<int>(ci);
          rep.cond2b_witness_iterate = k;
        }
        rep.cond2b = false;
        break;
      }
      for (int p = 1; p <= opts.cycle_max_period && p < k; ++p) {
        const std::size_t last = orbit.size() - 1;
        if (circle_distance(orbit[last], orbit[last - static_cast<std::size_t>(p)]) >= opts.cycle_tol)
          continue;
        double logd = 0.0;
        for (int j = 0; j < p; ++j)
          logd += std::log(std::abs(map.df(orbit[last - static_cast<std::size_t>(j)])));
        if (logd > 0.0) {
          landed = p;
          break;
        }
      }
    }
    rep.critical_orbits.push_back(orbit);
    rep.critical_landing_period.push_back(landed);
  }

  // (2c) first-return expansion from the critical neighborhood.
  rep.cond2c = true;
  rep.cond2c_worst_margin = std::numeric_limits<double>::infinity();
  const double logc0 = std::log(rep.c0);
  const double lam = std::isfinite(rep.lambda0) ? rep.lambda0 : 0.0;
  for (double x0 : grid) {
    if (!ctx.inside(x0) || ctx.dist_to_C(x0) < 1e-12) continue;
    ++rep.cond2c_checked;
    double x = x0, s = 0.0;
    int p0 = 0;
    for (int k = 1; k <= horizon; ++k) {
      s += std::log(std::abs(map.df(x)));
      x = map(x);
      if (ctx.inside(x)) {
        p0 = k;
        break;
      }
    }
    if (p0 == 0) {
      ++rep.cond2c_unresolved;
      continue;
    }
    const double margin = s - (lam * p0 / 3.0 - logc0);
    if (margin < rep.cond2c_worst_margin) {
      rep.cond2c_worst_margin = margin;
      rep.cond2c_witness = x0;
    }
    if (margin < 0.0) rep.cond2c = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Transversality

namespace {

struct Continued {
  double value = 0.0;  // f_a(c(a)) - beta(a), wrapped
  bool ok = false;
};

double newton_critical(const CircleMap& m, double c) {
  for (int it = 0; it < 50; ++it) {
    const double d = m.df(c), dd = m.d2f(c);
    if (dd == 0.0) break;
    const double step = d / dd;
    c -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return c;
}

bool same_lap(double x, double y, const std::vector<double>& crit) {
  const double d = wrap_pi(y - x);
  for (double c : crit) {
    const double dc = wrap_pi(c - x);
    if ((d >= 0.0 && dc >= 0.0 && dc <= d) || (d < 0.0 && dc < 0.0 && dc >= d)) return false;
  }
  return true;
}

Continued continue_at(const CircleFamily& family, double a, double c_star,
                      const std::vector<double>& ref_orbit) {
  Continued out;
  const CircleMap m = family(a);
  const auto crit = critical_angles(critical_set(m));
  const double c = newton_critical(m, c_star);
  double y = ref_orbit.back();
  for (std::size_t k = ref_orbit.size() - 1; k-- > 0;) {
    const double target = y;
    double z = ref_orbit[k];
    bool conv = false;
    for (int it = 0; it < 60; ++it) {
      const double fz = m.f(z);
      const double r = wrap_pi(fz - target);
      const double d = m.df(z);
      if (d == 0.0) break;
      z -= r / d;
      // lifted values can be large, so the residual floor is relative
      if (std::abs(r) <= 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fz))) {
        conv = true;
        break;
      }
    }
    if (!conv || !same_lap(ref_orbit[k], z, crit)) return out;
    y = z;
  }
  out.value = wrap_pi(m.f(c) - y);
  out.ok = true;
  return out;
}

}  // namespace

TransversalityResult transversality(const CircleFamily& family, double a_star, double c, double h,
                                    int pullback_steps) {
  const CircleMap m0 = family(a_star);
  const double c_star = newton_critical(m0, c);
  std::vector<double> orbit{m0(c_star)};
  for (int k = 1; k < pullback_steps; ++k) orbit.push_back(m0(orbit.back()));

  TransversalityResult r;
  for (int attempt = 0; attempt <= 4; ++attempt) {
    const Continued plus = continue_at(family, a_star + h, c_star, orbit);
    const Continued minus = continue_at(family, a_star - h, c_star, orbit);
    if (plus.ok && minus.ok) {
      r.xi = (plus.value - minus.value) / (2.0 * h);
      r.h_used = h;
      r.retries = attempt;
      r.nonzero = std::abs(r.xi) > 1e-4;
      return r;
    }
    h *= 0.5;
  }
  throw NumericFailure(FailureKind::ContinuationBroken,
                       "itinerary changes within the continuation interval", {a_star, h});
}

std::vector<double> landing_parameters(const CircleFamily& family, int c_index, double a_lo,
                                       double a_hi, int grid) {
  const CircleMap m = family(0.0);
  const auto crit = critical_angles(critical_set(m));
  if (c_index < 0 || static_cast<std::size_t>(c_index) >= crit.size())
    throw std::invalid_argument("critical point index out of range");
  const double c = crit[static_cast<std::size_t>(c_index)];
  const double v = m.f(c);
  auto g = [&](double p) { return wrap_pi(m.f(p) - v); };
  std::vector<double> out;
  const double h = kTwoPi / grid;
  double gp = g(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double t = i * h;
    const double gc = g(t);
    if ((gp < 0.0) != (gc < 0.0) && std::abs(gp) + std::abs(gc) < kPi) {
      const double p = refine_root(g, m.df, t - h, t, 1e-15);
      if (circle_distance(p, c) > 1e-6 && std::abs(m.df(p)) > 1.0) {
        double a = wrap_angle(p - m.f(p));
        while (a < a_lo) a += kTwoPi;
        while (a - kTwoPi >= a_lo) a -= kTwoPi;
        if (a <= a_hi) out.push_back(a);
      }
    }
    gp = gc;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Precheck for families t + a + K Psi(t) + Phi(t, a)

Potential log_potential(double c1, double c2) {
  Potential p;
  p.psi = [=](double t) { return -std::log(1.0 + c1 * std::sin(t) + c2 * std::cos(t)); };
  p.dpsi = [=](double t) {
    return -(c1 * std::cos(t) - c2 * std::sin(t)) / (1.0 + c1 * std::sin(t) + c2 * std::cos(t));
  };
  p.d2psi = [=](double t) {
    const double d = 1.0 + c1 * std::sin(t) + c2 * std::cos(t);
    const double n = c1 * std::cos(t) - c2 * std::sin(t);
    return ((c1 * std::sin(t) + c2 * std::cos(t)) * d + n * n) / (d * d);
  };
  p.amplitude = std::hypot(c1, c2);
  return p;
}

PropFamilyReport check_prop_family(const Potential& psi,
                                   const std::function<double(double, double)>& phi, double K,
                                   int grid) {
  PropFamilyReport rep;
  double max_phi_t = 0.0;
  if (phi) {
    const double h = 1e-3;
    auto d = [&](double t, double a, int nt, int na) {
      // Mixed central difference of order nt in t and na in a.
      static const double w1[] = {-0.5, 0.0, 0.5};
      static const double w2[] = {1.0, -2.0, 1.0};
      static const double w3[] = {-0.5, 1.0, 0.0, -1.0, 0.5};
      auto weights = [](int n, int& len) -> const double* {
        if (n == 1) { len = 3; return w1; }
        if (n == 2) { len = 3; return w2; }
        len = 5;
        return w3;
      };
      int lt = 1, la = 1;
      const double one[] = {1.0};
      const double* wt = nt == 0 ? one : weights(nt, lt);
      const double* wa = na == 0 ? one : weights(na, la);
      double s = 0.0;
      for (int i = 0; i < lt; ++i)
        for (int j = 0; j < la; ++j) {
          const double ti = t + (i - lt / 2) * h, aj = a + (j - la / 2) * h;
          s += wt[i] * wa[j] * phi(ti, aj);
        }
      return s / std::pow(h, nt + na);
    };
    const int nt = 64, na = 16;
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < na; ++j) {
        const double t = kTwoPi * i / nt, a = kTwoPi * j / na;
        for (int o = 0; o <= 3; ++o)
          for (int p = 0; p <= o; ++p) {
            const double v = std::abs(o == 0 ? phi(t, a) : d(t, a, o - p, p));
            rep.phi_c3_norm = std::max(rep.phi_c3_norm, v);
            if (o == 1 && p == 0) max_phi_t = std::max(max_phi_t, v);
          }
      }
  }
  rep.phi_small = rep.phi_c3_norm < 0.01;

  const double h = kTwoPi / grid;
  double prev = psi.dpsi(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double t = i * h, cur = psi.dpsi(t);
    if ((prev < 0.0) != (cur < 0.0))
      rep.psi_critical.push_back(wrap_angle(refine_root(psi.dpsi, psi.d2psi, t - h, t, 1e-13)));
    prev = cur;
  }
  std::sort(rep.psi_critical.begin(), rep.psi_critical.end());
  rep.psi_nondegenerate = true;
  for (double c : rep.psi_critical)
    if (std::abs(psi.d2psi(c)) < 1e-8) rep.psi_nondegenerate = false;

  const double delta0 = default_delta0(rep.psi_critical);
  double min_dpsi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double t = i * h;
    bool near = false;
    for (double c : rep.psi_critical) near = near || circle_distance(t, c) < delta0;
    if (!near) min_dpsi = std::min(min_dpsi, std::abs(psi.dpsi(t)));
  }
  rep.K_threshold = (2.0 + max_phi_t) / min_dpsi;
  rep.K_exceeds = K > rep.K_threshold;
  rep.amplitude_warning = psi.amplitude > 0.5;
  return rep;
}

}  // namespace rankone
