#include <cmath>

#include "doctest.h"
#include "rankone/fixtures.hpp"
#include "rankone/melnikov.hpp"

using namespace rankone;
using doctest::Approx;

namespace {

// u + v = exp(-|s|), E = 0, h = 1 on [-30, 30] with the window at +-5.
MelnikovSamples synthetic(double h = 1e-3) {
  MelnikovSamples m;
  const double lo = -30.0, L = 5.0;
  const double cuts[] = {lo, -L, 0.0, L, -lo};
  for (int piece = 0; piece < 4; ++piece) {
    const int n = static_cast<int>(std::lround((cuts[piece + 1] - cuts[piece]) / h));
    m.breaks.push_back(m.s.size());
    for (int i = 0; i < n; ++i) m.s.push_back(cuts[piece] + (cuts[piece + 1] - cuts[piece]) * i / n);
  }
  m.s.push_back(-lo);
  m.breaks.push_back(m.s.size() - 1);
  for (double s : m.s) {
    m.weight.push_back(std::exp(-std::abs(s)));
    m.profile.push_back(1.0);
    m.E.push_back(0.0);
  }
  m.L_minus = m.L_plus = L;
  m.epsilon = std::exp(-L);
  return m;
}

struct Loop {
  fixtures::GluedLoop gl = fixtures::glued_loop();
  HomoclinicOrbit orbit;
  MelnikovData data;
  explicit Loop(double eps) {
    const SaddleInfo sd = locate_saddle(gl.field, {0.01, -0.02});
    orbit = compute_homoclinic(gl.field, sd, eps, 1e-9);
    frames_and_E(orbit, gl.field);
    data = compute_ACS(orbit, gl.field, 5.0);
  }
};

MelnikovData with_acs(double A, double C, double S) {
  MelnikovData d;
  d.A = d.A_L = A;
  d.C = d.C_L = C;
  d.S = d.S_L = S;
  return d;
}

}  // namespace

TEST_CASE("synthetic integrand: A, C, S in closed form") {
  const MelnikovSamples m = synthetic();
  for (double omega : {1.0, 5.0, 20.0}) {
    CAPTURE(omega);
    const MelnikovData d = compute_ACS(m, omega);
    CHECK(std::abs(d.A - 2.0) < 1e-10);
    CHECK(std::abs(d.C - 2.0 / (1.0 + omega * omega)) < 1e-10);
    CHECK(std::abs(d.S) < 1e-12);
    CHECK(d.rate_forward == Approx(1.0).epsilon(1e-6));
    CHECK(d.rate_backward == Approx(1.0).epsilon(1e-6));
    // truncation tail of the window is 2 e^{-5}
    CHECK(d.tail_estimate == Approx(2.0 * std::exp(-5.0)).epsilon(1e-6));
  }
}

TEST_CASE("short window is reported") {
  MelnikovOptions o;
  o.window_tol = 1e-3;
  try {
    compute_ACS(synthetic(), 1.0, o);
    FAIL("expected window-too-short");
  } catch (const NumericFailure& e) {
    CHECK(e.kind() == FailureKind::WindowTooShort);
  }
}

TEST_CASE("rho interval from the displayed constants") {
  const auto [lo, hi] = rho_interval(with_acs(-1.0, 1.0, 0.0));
  CHECK(lo == 202.0 / 99.0);
  CHECK(hi == 396.0 / 101.0);
  const auto [lo2, hi2] = rho_interval(with_acs(1.0, 0.6, 0.8));
  CHECK(lo2 == Approx(-396.0 / 101.0).epsilon(1e-15));
  CHECK(hi2 == Approx(-202.0 / 99.0).epsilon(1e-15));
  CHECK(lo2 < hi2);
  CHECK_THROWS(rho_interval(with_acs(0.0, 1.0, 0.0)));
}

TEST_CASE("H2 checks") {
  CHECK(check_H2(with_acs(2.0, 0.5, 0.0)).pass);
  const H2Report a0 = check_H2(with_acs(0.0, 0.5, 0.0));
  CHECK_FALSE(a0.nonzero_A);
  CHECK_FALSE(a0.pass);
  const H2Report cs0 = check_H2(with_acs(1.0, 0.0, 0.0));
  CHECK(cs0.nonzero_A);
  CHECK_FALSE(cs0.nonzero_CS);
  CHECK_FALSE(cs0.pass);
}

TEST_CASE("wave coefficient amplitude identity") {
  MelnikovData d = with_acs(-0.8, 0.3, -0.45);
  d.A_L = -0.79;
  d.C_L = 0.31;
  d.S_L = -0.44;
  d.E_integral_plus = 2.0;
  d.epsilon = 0.05;
  const double rho = 1.7;
  const WaveCoefficients w = wave_coefficients(d, rho);
  const double lhs = w.c1 * w.c1 + w.c2 * w.c2;
  const double rhs = (d.C_L * d.C_L + d.S_L * d.S_L) / (d.A_L * d.A_L * rho * rho);
  CHECK(std::abs(lhs - rhs) < 1e-14);
  CHECK(w.amplitude == Approx(std::sqrt(rhs)));
}

TEST_CASE("wrong sign of -rho A is a sign error") {
  const MelnikovData d = with_acs(1.0, 0.3, 0.1);
  try {
    wave_coefficients(d, 1.0);
    FAIL("expected sign error");
  } catch (const NumericFailure& e) {
    CHECK(e.kind() == FailureKind::SignError);
  }
}

TEST_CASE("glued loop: amplitude band over the rho interval") {
  const Loop l(0.002);
  const MelnikovData& d = l.data;
  REQUIRE(d.rho1 < d.rho2);
  for (int i = 0; i <= 10; ++i) {
    const double rho = d.rho1 + (d.rho2 - d.rho1) * i / 10.0;
    const WaveCoefficients w = wave_coefficients(d, rho);
    CAPTURE(rho);
    CHECK(w.amplitude > 0.25);
    CHECK(w.amplitude < 0.5);
    CHECK(w.band_ok);
  }
  const WaveCoefficients mid = wave_coefficients(d, 0.5 * (d.rho1 + d.rho2));
  CHECK(mid.rho_in_interval);
}

TEST_CASE("glued loop: integrals are stable when the window grows") {
  const Loop a(0.05), b(0.0025);
  CHECK(b.orbit.L_minus > 2.0 * a.orbit.L_minus * 0.9);
  CHECK(std::abs(a.data.A - b.data.A) < 1e-6);
  CHECK(std::abs(a.data.C - b.data.C) < 1e-6);
  CHECK(std::abs(a.data.S - b.data.S) < 1e-6);
}

TEST_CASE("K1 scales like eps^(-beta/alpha)") {
  double lo = 1e300, hi = 0.0;
  for (double eps : {0.1, 0.05, 0.025}) {
    const Loop l(eps);
    const MelnikovData& d = l.data;
    const WaveCoefficients w = wave_coefficients(d, 0.5 * (d.rho1 + d.rho2));
    const double scaled = w.K1 * std::pow(eps, 0.5);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 3.0);
}
