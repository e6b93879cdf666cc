#include "rankone/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "parallel.hpp"
#include "rankone/errors.hpp"

namespace rankone {

namespace {

std::vector<long long> continued_fraction(double x, int terms) {
  std::vector<long long> out;
  for (int i = 0; i < terms && std::isfinite(x); ++i) {
    const double a = std::floor(x);
    if (std::abs(a) > 1e9) break;
    out.push_back(static_cast<long long>(a));
    const double frac = x - a;
    if (frac < 1e-9) break;
    x = 1.0 / frac;
  }
  return out;
}

bool finite(const ASState& s) { return std::isfinite(s.X) && std::isfinite(s.theta); }

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

Map2D as_map(const ASParams& p) {
  p.validate();
  Map2D m;
  m.step = [p](const ASState& s) { return map_F_lifted(s, p); };
  m.jacobian = [p](const ASState& s) { return jacobian_F(s, p); };
  m.log_abs_det = [p](const ASState& s) { return log_det_F(s, p); };
  m.in_domain = [](const ASState& s) { return s.X >= 0.0; };
  m.X_lo = 0.0;
  m.X_hi = p.x_domain();
  m.name = "as-model";
  return m;
}

LyapunovResult lyapunov(const Map2D& map, const ASState& start, std::size_t n,
                        std::size_t transient, const LyapunovOptions& opts) {
  if (!map.step || !map.jacobian) throw NumericFailure(FailureKind::InvalidInput, "map needs step and jacobian");
  if (opts.enforce_budget && (n < 10000 || transient < 1000))
    throw NumericFailure(FailureKind::InvalidInput, "need n >= 1e4 and transient >= 1e3",
                         {static_cast<double>(n), static_cast<double>(transient)});
  LyapunovResult r;
  ASState s = start;
  s.theta = wrap_angle(s.theta);
  auto bad = [&](const ASState& x) { return !finite(x) || (map.in_domain && !map.in_domain(x)); };

  for (std::size_t i = 0; i < transient; ++i) {
    ASState next = map.step(s);
    if (bad(next)) {
      r.escaped = true;
      r.end = s;
      return r;
    }
    next.theta = wrap_angle(next.theta);
    s = next;
  }
  r.transient_dropped = transient;

  Vec2 q1{1.0, 0.0};
  double S1 = 0.0, S2 = 0.0, SD = 0.0, rot = 0.0, rot_half = 0.0;
  const std::size_t keep_from = n > opts.tail_keep ? n - opts.tail_keep : 0;
  std::size_t i = 0;
  for (; i < n; ++i) {
    const Mat2 J = map.jacobian(s);
    const double ld_jac = log_abs_det(J);
    const double ld = map.log_abs_det ? map.log_abs_det(s) : ld_jac;
    const ASState next = map.step(s);
    if (bad(next) || !std::isfinite(ld)) {
      r.escaped = true;
      break;
    }
    const Vec2 v1 = J * q1;
    const double r11 = norm(v1);
    q1 = v1 / r11;
    // r22 follows from |det J| = r11 r22; the second column is never formed.
    S1 += std::log(r11);
    S2 += ld - std::log(r11);
    SD += ld_jac;
    rot += next.theta - s.theta;
    if (i + 1 == n / 2) rot_half = rot / (kTwoPi * static_cast<double>(n / 2));
    s = {next.X, wrap_angle(next.theta)};
    if (i >= keep_from) r.tail.push_back(s);
  }
  r.iterates_used = i;
  r.end = s;
  if (i == 0) return r;
  const double dn = static_cast<double>(i);
  r.lambda1 = S1 / dn;
  r.lambda2 = S2 / dn;
  if (r.lambda2 > r.lambda1) std::swap(r.lambda1, r.lambda2);
  r.mean_log_det = SD / dn;
  r.identity_error = std::abs(r.lambda1 + r.lambda2 - r.mean_log_det);
  r.rotation_number = rot / (kTwoPi * dn);
  const auto cf_full = continued_fraction(r.rotation_number, 12);
  const auto cf_half = continued_fraction(rot_half, 12);
  while (r.rotation_cf_agree < static_cast<int>(std::min(cf_full.size(), cf_half.size())) &&
         cf_full[r.rotation_cf_agree] == cf_half[r.rotation_cf_agree])
    ++r.rotation_cf_agree;
  return r;
}

std::string_view to_string(AttractorClass c) {
  switch (c) {
    case AttractorClass::PeriodicSink: return "periodic-sink";
    case AttractorClass::InvariantCircle: return "invariant-circle";
    case AttractorClass::Chaotic: return "chaotic";
    case AttractorClass::Unresolved: return "unresolved";
  }
  return "unresolved";
}

std::vector<ASState> random_starts(const Map2D& map, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(map.X_lo, map.X_hi), ut(0.0, kTwoPi);
  std::vector<ASState> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = ux(rng);
    out.push_back({x, ut(rng)});
  }
  return out;
}

int detect_period(const std::vector<ASState>& tail, int max_period, double tol) {
  const int size = static_cast<int>(tail.size());
  double xs = 0.0;
  for (const auto& s : tail) xs = std::max(xs, std::abs(s.X));
  if (xs == 0.0) xs = 1.0;
  for (int p = 1; p <= max_period && p < size; ++p) {
    const int m = std::min(size - p, 64);
    bool ok = true;
    for (int k = size - 1; k >= size - m && ok; --k) {
      const double d = std::abs(wrap_pi(tail[k].theta - tail[k - p].theta)) +
                       std::abs(tail[k].X - tail[k - p].X) / xs;
      ok = d < tol;
    }
    if (ok) return p;
  }
  return 0;
}

double curve_residual(const std::vector<ASState>& tail) {
  if (tail.size() < 8) return 0.0;
  std::vector<ASState> v = tail;
  std::sort(v.begin(), v.end(), [](const ASState& a, const ASState& b) { return a.theta < b.theta; });
  double lo = v.front().X, hi = v.front().X;
  for (const auto& s : v) {
    lo = std::min(lo, s.X);
    hi = std::max(hi, s.X);
  }
  const double range = hi - lo;
  if (range <= 0.0) return 0.0;
  double worst = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ASState& a = v[(i + n - 1) % n];
    const ASState& b = v[(i + 1) % n];
    double ta = a.theta, tb = b.theta;
    if (i == 0) ta -= kTwoPi;
    if (i + 1 == n) tb += kTwoPi;
    const double span = tb - ta;
    const double interp = span > 0.0 ? a.X + (b.X - a.X) * (v[i].theta - ta) / span : 0.5 * (a.X + b.X);
    worst = std::max(worst, std::abs(v[i].X - interp));
  }
  return worst / range;
}

Classification classify_attractor(const Map2D& map, const ClassifyOptions& o) {
  Classification c;
  c.starts = random_starts(map, static_cast<std::size_t>(std::max(o.seeds, 1)), o.seed);
  c.first = lyapunov(map, c.starts[0], o.n, o.transient);
  c.seed_lambda1.push_back(c.first.lambda1);
  if (c.first.escaped) return c;
  c.period = detect_period(c.first.tail, o.max_period, o.cycle_tol);
  c.curve_residual = curve_residual(c.first.tail);
  if (c.period > 0 && c.first.lambda1 < 0.0) {
    c.cls = AttractorClass::PeriodicSink;
    return c;
  }
  if (c.first.lambda1 > o.chaos_threshold) {
    bool all = true;
    for (std::size_t k = 1; k < c.starts.size(); ++k) {
      const LyapunovResult r = lyapunov(map, c.starts[k], o.n, o.transient);
      c.seed_lambda1.push_back(r.lambda1);
      all = all && !r.escaped && r.lambda1 > o.chaos_threshold;
    }
    c.cls = all ? AttractorClass::Chaotic : AttractorClass::Unresolved;
    return c;
  }
  if (std::abs(c.first.lambda1) <= o.circle_band && c.period == 0 && c.curve_residual < o.curve_tol)
    c.cls = AttractorClass::InvariantCircle;
  return c;
}

int ScanSummary::chaotic_decade_run() const {
  int best = 0, run = 0, prev = 0;
  bool have = false;
  for (const auto& d : decades) {
    if (d.chaotic == 0) {
      run = 0;
      have = false;
      continue;
    }
    run = (have && d.k == prev + 1) ? run + 1 : 1;
    have = true;
    prev = d.k;
    best = std::max(best, run);
  }
  return best;
}

ScanSummary summarize(const std::vector<ScanRecord>& records, int a_bins) {
  ScanSummary s;
  std::map<int, DecadeSummary> dec, bins;
  for (const ScanRecord& r : records) {
    ++s.total;
    if (!r.error.empty()) ++s.failed;
    ++s.counts[static_cast<int>(r.cls)];
    s.max_identity_error = std::max(s.max_identity_error, r.identity_error);
    const bool chaotic = r.cls == AttractorClass::Chaotic;
    if (r.point.mu > 0.0) {
      const int k = static_cast<int>(std::floor(std::log10(1.0 / r.point.mu) + 1e-12));
      auto& d = dec[k];
      d.k = k;
      ++d.total;
      d.chaotic += chaotic;
    }
    if (a_bins > 0) {
      const int k = std::min(a_bins - 1, static_cast<int>(wrap_angle(r.point.a) / kTwoPi * a_bins));
      auto& d = bins[k];
      d.k = k;
      ++d.total;
      d.chaotic += chaotic;
    }
  }
  for (auto& [k, d] : dec) s.decades.push_back(d);
  for (auto& [k, d] : bins) s.a_bins.push_back(d);
  return s;
}

std::vector<ScanRecord> scan(const MapFactory& factory, const std::vector<ScanPoint>& grid,
                             const ClassifyOptions& opts, const RecordSink& sink, unsigned threads) {
  std::vector<ScanRecord> records(grid.size());
  std::vector<char> done(grid.size(), 0);
  std::size_t next = 0;
  std::mutex mtx;
  detail::parallel_chunks(grid.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
    for (std::size_t i = b; i < e; ++i) {
      ScanRecord rec;
      rec.index = i;
      rec.point = grid[i];
      try {
        const Classification c = classify_attractor(factory(grid[i]), opts);
        rec.lambda1 = c.first.lambda1;
        rec.lambda2 = c.first.lambda2;
        rec.cls = c.cls;
        rec.period = c.period;
        rec.iterates_used = c.first.iterates_used;
        rec.transient_dropped = c.first.transient_dropped;
        rec.identity_error = c.first.identity_error;
        if (c.cls == AttractorClass::InvariantCircle || c.cls == AttractorClass::PeriodicSink)
          rec.rotation_number = c.first.rotation_number;
        if (c.first.escaped) rec.error = "orbit left the domain";
        double m1 = 0.0, m2 = 0.0;
        for (const auto& s : c.first.tail) {
          const double v = std::sin(s.theta);
          m1 += v;
          m2 += v * v;
        }
        if (!c.first.tail.empty()) {
          m1 /= c.first.tail.size();
          m2 /= c.first.tail.size();
        }
        rec.birkhoff = {m1, std::max(0.0, m2 - m1 * m1)};
      } catch (const std::exception& ex) {
        rec.cls = AttractorClass::Unresolved;
        rec.error = ex.what();
      }
      std::lock_guard<std::mutex> lock(mtx);
      records[i] = std::move(rec);
      done[i] = 1;
      while (next < grid.size() && done[next]) {
        if (sink) sink(records[next]);
        ++next;
      }
    }
  });
  return records;
}

MapFactory as_factory(const ASParams& base) {
  return [base](const ScanPoint& pt) {
    ASParams p = base;
    if (pt.mu > 0.0) p.mu = pt.mu;
    if (pt.omega > 0.0) p.omega = pt.omega;
    p.xi1 += pt.a;
    return as_map(p);
  };
}

BirkhoffReport birkhoff_genericity(const Map2D& map, const std::function<double(const ASState&)>& obs,
                                   std::size_t starts, std::size_t n, std::size_t transient,
                                   std::uint64_t seed) {
  if (starts < 2 || n < 16) throw NumericFailure(FailureKind::InvalidInput, "need at least 2 starts and 16 iterates");
  BirkhoffReport rep;
  rep.seed = seed;
  for (std::size_t d = 16; d >= 1; d /= 2) rep.checkpoints.push_back(n / d);
  const auto init = random_starts(map, starts, seed);
  std::vector<std::vector<double>> at(rep.checkpoints.size());
  for (const ASState& st : init) {
    ASState s = st;
    for (std::size_t i = 0; i < transient; ++i) s = map.step(s);
    double sum = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      s = map.step(s);
      s.theta = wrap_angle(s.theta);
      if (!finite(s)) throw NumericFailure(FailureKind::LeftDomain, "orbit diverged", {st.X, st.theta});
      sum += obs(s);
      if (c < rep.checkpoints.size() && i == rep.checkpoints[c]) at[c++].push_back(sum / static_cast<double>(i));
    }
    rep.averages.push_back(sum / static_cast<double>(n));
  }
  std::vector<double> lx, ly;
  for (std::size_t c = 0; c < at.size(); ++c) {
    const auto [mn, mx] = std::minmax_element(at[c].begin(), at[c].end());
    rep.spreads.push_back(*mx - *mn);
    if (rep.spreads.back() > 0.0) {
      lx.push_back(std::log(static_cast<double>(rep.checkpoints[c])));
      ly.push_back(std::log(rep.spreads.back()));
    }
  }
  rep.spread = rep.spreads.back();
  rep.decay_exponent = fit_slope(lx, ly);
  rep.converging = rep.spread < 1e-12 || rep.decay_exponent < -0.25;

  std::vector<double> v = rep.averages;
  std::sort(v.begin(), v.end());
  double gap = 0.0;
  std::size_t cut = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] > gap) {
      gap = v[i] - v[i - 1];
      cut = i;
    }
  const double within = std::max(v[cut - 1] - v.front(), v.back() - v[cut]);
  rep.bimodal = gap > 1e-9 && gap > 10.0 * within;
  return rep;
}

}  // namespace rankone
