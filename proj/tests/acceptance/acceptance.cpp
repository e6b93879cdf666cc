// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "rankone/as_model.hpp"
#include "rankone/diagnostics.hpp"
#include "rankone/fixtures.hpp"
#include "rankone/flowmap.hpp"
#include "rankone/homoclinic.hpp"
#include "rankone/melnikov.hpp"
#include "rankone/onedim.hpp"
#include "rankone/quadrature.hpp"
#include "rankone/rank_one.hpp"

using namespace rankone;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <class... T>
std::string fmt(const char* f, T... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void run(int id, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool ok = v.pass && in_time;
  if (!ok) ++failures;
  std::printf("criterion %d: %s  %s  (%.2f s of %.0f s)\n", id, ok ? "PASS" : "FAIL", v.detail.c_str(), secs,
              budget_s);
  std::fflush(stdout);
}

MelnikovData with_acs(double A, double C, double S) {
  MelnikovData d;
  d.A = d.A_L = A;
  d.C = d.C_L = C;
  d.S = d.S_L = S;
  return d;
}

// u + v = exp(-|s|), E = 0, h = 1 on [-30, 30], window +-5
MelnikovSamples synthetic() {
  MelnikovSamples m;
  const double cuts[] = {-30.0, -5.0, 0.0, 5.0, 30.0};
  const double h = 1e-3;
  for (int piece = 0; piece < 4; ++piece) {
    const int n = static_cast<int>(std::lround((cuts[piece + 1] - cuts[piece]) / h));
    m.breaks.push_back(m.s.size());
    for (int i = 0; i < n; ++i) m.s.push_back(cuts[piece] + (cuts[piece + 1] - cuts[piece]) * i / n);
  }
  m.s.push_back(30.0);
  m.breaks.push_back(m.s.size() - 1);
  for (double s : m.s) {
    m.weight.push_back(std::exp(-std::abs(s)));
    m.profile.push_back(1.0);
    m.E.push_back(0.0);
  }
  m.L_minus = m.L_plus = 5.0;
  m.epsilon = std::exp(-5.0);
  return m;
}

struct Loop {
  VectorFieldSpec field;
  SaddleInfo saddle;
  HomoclinicOrbit orbit;
  MelnikovData data;
  WaveCoefficients waves;
};

Loop glued(double eps, double omega) {
  Loop l;
  l.field = fixtures::glued_loop().field;
  l.saddle = locate_saddle(l.field, {0.01, -0.02});
  l.orbit = compute_homoclinic(l.field, l.saddle, eps, 1e-9);
  frames_and_E(l.orbit, l.field);
  l.data = compute_ACS(l.orbit, l.field, omega);
  const auto [lo, hi] = rho_interval(l.data);
  l.waves = wave_coefficients(l.data, 0.5 * (lo + hi));
  l.field.omega = omega;
  l.field.rho = l.waves.rho;
  return l;
}

bool close_ulps(double x, double y, int ulps = 2) {
  return std::abs(x - y) <= ulps * std::numeric_limits<double>::epsilon() * std::abs(y);
}

double identity_worst = 0.0;  // collected from every diagnostic orbit below

Verdict criterion1() {
  const MelnikovSamples m = synthetic();
  double eA = 0, eC = 0, eS = 0;
  for (double omega : {1.0, 5.0, 20.0}) {
    const MelnikovData d = compute_ACS(m, omega);
    eA = std::max(eA, std::abs(d.A - 2.0));
    eC = std::max(eC, std::abs(d.C - 2.0 / (1.0 + omega * omega)));
    eS = std::max(eS, std::abs(d.S));
  }
  return {eA < 1e-10 && eC < 1e-10 && eS < 1e-12, fmt("|dA| %.1e |dC| %.1e |S| %.1e", eA, eC, eS)};
}

Verdict criterion2() {
  const auto [r1, r2] = rho_interval(with_acs(-1.0, 1.0, 0.0));
  const bool consts = close_ulps(r1, 202.0 / 99.0) && close_ulps(r2, 396.0 / 101.0);
  const Loop l = glued(0.002, 5.0);
  const auto [lo, hi] = rho_interval(l.data);
  double amin = 1e300, amax = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const WaveCoefficients w = wave_coefficients(l.data, lo + (hi - lo) * i / 10.0);
    amin = std::min(amin, w.amplitude);
    amax = std::max(amax, w.amplitude);
  }
  const bool band = amin > 0.25 && amax < 0.5;
  return {consts && band, fmt("rho1 %.17g rho2 %.17g; amplitude in [%.4f, %.4f] on 11 rho", r1, r2, amin, amax)};
}

Verdict criterion3() {
  const ASParams p;  // omega / beta = 100
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> X(0.0, p.x_domain()), T(0.0, kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const ASState s{X(rng), T(rng)};
    const auto [y, th] = map_M(p.mu * s.X, s.theta, p);
    const auto [x1, th1] = map_N(y, th, p);
    const ASState f = map_F(s, p);
    worst = std::max({worst, std::abs(f.X - x1 / p.mu), circle_distance(f.theta, th1)});
  }
  return {worst < 1e-12, fmt("max discrepancy %.2e on 1e4 states", worst)};
}

Verdict criterion4() {
  const Family2D fam = as_family(ASParams{}, {1, 41, 81, 121, 161});
  const C1Report r = c1_check(fam, GridSpec{}, 0);
  return {std::abs(r.exponent_X - 1.0) <= 0.1,
          fmt("exponent %.4f over b in [%.2e, %.2e]", r.exponent_X, fam.b_values.back(), fam.b_values.front())};
}

Verdict criterion5() {
  ASParams p;
  p.omega = 100.0;
  p.A_amp = 0.3;
  const CircleFamily fam = [p](double a) { return circle_map(p, a); };
  MisiurewiczOptions o;
  o.M0 = 30;
  o.grid_log2 = 14;
  double best = -1e300, best_a = 0.0;
  int sampled = 0;
  for (double a : landing_parameters(fam, 0, 0.0, kTwoPi)) {
    ++sampled;
    const MisiurewiczReport r = verify_misiurewicz(circle_map(p, a), 0.03, 100, o);
    if (r.lambda0 > best) {
      best = r.lambda0;
      best_a = a;
    }
    if (best > std::log(10.0)) break;
  }
  return {best > std::log(10.0), fmt("lambda0 %.4f at a = %.6f (ln 10 = %.4f), %d a sampled", best, best_a,
                                     std::log(10.0), sampled)};
}

Verdict criterion6() {
  ClassifyOptions co;
  // small frequency: 50 log-uniform mu in [1e-8, 1e-4] at omega/beta = 2 and 1
  std::size_t bad = 0, total_small = 0;
  double lam_max = -1e300;
  for (double omega : {2.0, 1.0}) {
    std::vector<ScanPoint> grid;
    for (int i = 0; i < 50; ++i) grid.push_back({std::pow(10.0, -8.0 + 4.0 * i / 49.0), 0.0, omega, 0.0, 0, "as"});
    for (const ScanRecord& r : scan(as_factory(ASParams{}), grid, co)) {
      ++total_small;
      identity_worst = std::max(identity_worst, r.identity_error);
      lam_max = std::max(lam_max, r.lambda1);
      const bool tame = r.cls == AttractorClass::PeriodicSink || r.cls == AttractorClass::InvariantCircle;
      if (!tame || r.lambda1 > 0.005 || !r.error.empty()) ++bad;
    }
  }
  // large frequency: ten mu per decade, k = 4..8
  std::vector<ScanPoint> grid;
  for (int k = 4; k <= 8; ++k)
    for (int i = 0; i < 10; ++i) grid.push_back({std::pow(10.0, -k - (i + 0.5) / 10.0), 0.0, 100.0, 0.0, 0, "as"});
  const auto recs = scan(as_factory(ASParams{}), grid, co);
  for (const ScanRecord& r : recs) identity_worst = std::max(identity_worst, r.identity_error);
  const ScanSummary s = summarize(recs);
  const int run = s.chaotic_decade_run();
  return {bad == 0 && run >= 3,
          fmt("small omega: %zu/%zu tame, max lambda1 %.4f; omega 100: %zu chaotic, %d consecutive decades",
              total_small - bad, total_small, lam_max, s.counts[static_cast<int>(AttractorClass::Chaotic)], run)};
}

Verdict criterion7() {
  // the orbits of criterion 6 plus a few direct runs
  ASParams p;
  for (double mu : {1e-4, 1e-6}) {
    for (const ASState& st : random_starts(as_map(p.with_mu(mu)), 3, 5)) {
      const LyapunovResult r = lyapunov(as_map(p.with_mu(mu)), st, 10000, 1000);
      identity_worst = std::max(identity_worst, r.identity_error);
    }
  }
  return {identity_worst <= 1e-6, fmt("max |l1 + l2 - <ln|det|>| %.2e", identity_worst)};
}

Verdict criterion8() {
  const double mu = 1e-6;
  const Loop l = glued(0.05, 5.0);
  const SectionPair sp =
      build_sections(l.orbit, mu, l.waves, estimate_K0hat(l.field, l.saddle.position, mu));
  const double zmax = sp.K0hat + 1.0;
  std::vector<double> Z0s, thetas;
  for (int i = 0; i < 4; ++i) Z0s.push_back(-zmax + 2.0 * zmax * i / 3.0);
  for (int i = 0; i < 8; ++i) thetas.push_back(kTwoPi * i / 8.0);
  const MStageReport r =
      m_stage_check(l.field.with_mu(mu), sp, l.waves, window_of(l.orbit, 5.0), Z0s, thetas, 0.05);
  return {r.pass() && r.samples.size() == 32,
          fmt("%zu samples, max relative error %.2e, all in Sigma+ range %s", r.samples.size(), r.max_relative_error,
              r.all_in_plus_range ? "yes" : "no")};
}

Verdict criterion9() {
  const Loop l = glued(0.1, 5.0);
  const SectionPair sp =
      build_sections(l.orbit, 1e-4, l.waves, estimate_K0hat(l.field, l.saddle.position, 1e-4));
  std::vector<double> mus;
  for (int i = 0; i <= 8; ++i) mus.push_back(std::pow(10.0, -4.0 - 0.5 * i));
  const PassageReport r = passage_time_check(l.field, sp, mus);
  return {r.pass(), fmt("slope*beta %.5f, max residual %.2e, curvature %.2e, max mu^-1 e^(-alpha t_N) %.3f",
                        r.slope * l.field.beta, r.max_abs_residual, r.curvature, r.max_escape_product)};
}

Verdict criterion10() {
  const Family2D fam = as_family(ASParams{}, {1, 38, 75, 112, 149});
  const C4Report r = c4_distortion(fam, GridSpec{});
  const double decades = std::log10(fam.b_values.front() / fam.b_values.back());
  return {r.ratio_spread <= 0.1 && decades >= 4.0 && r.pass,
          fmt("ratio %.4f, spread %.2e over %.2f decades of b", r.max_ratio, r.ratio_spread, decades)};
}

}  // namespace

int main() {
  run(1, 1.0, criterion1);
  run(2, 10.0, criterion2);
  run(3, 1.0, criterion3);
  run(4, 30.0, criterion4);
  run(5, 60.0, criterion5);
  run(6, 600.0, criterion6);
  run(7, 600.0, criterion7);
  run(8, 300.0, criterion8);
  run(9, 300.0, criterion9);
  run(10, 30.0, criterion10);
  return failures == 0 ? 0 : 1;
}
