#include <cmath>

#include "doctest.h"
#include "rankone/fixtures.hpp"
#include "rankone/flowmap.hpp"

using namespace rankone;
using doctest::Approx;

namespace {

struct Setup {
  fixtures::GluedLoop gl = fixtures::glued_loop();
  VectorFieldSpec field;
  SaddleInfo saddle;
  HomoclinicOrbit orbit;
  MelnikovData data;
  WaveCoefficients waves;
  PredictionWindow window;

  explicit Setup(double eps) {
    field = gl.field;
    saddle = locate_saddle(field, {0.01, -0.02});
    orbit = compute_homoclinic(field, saddle, eps, 1e-9);
    frames_and_E(orbit, field);
    const double omega = 5.0;
    data = compute_ACS(orbit, field, omega);
    const auto [lo, hi] = rho_interval(data);
    waves = wave_coefficients(data, 0.5 * (lo + hi));
    field.omega = omega;
    field.rho = waves.rho;
    window = window_of(orbit, omega);
  }

  SectionPair sections(double mu) const {
    return build_sections(orbit, mu, waves, estimate_K0hat(field, saddle.position, mu));
  }
};

const Setup& setup() {
  static const Setup s(0.05);
  return s;
}

}  // namespace

TEST_CASE("section ranges scale with mu") {
  const Setup& s = setup();
  const double mu = 1e-6;
  const SectionPair sp = s.sections(mu);
  CHECK(sp.K0hat > 0.0);
  CHECK(sp.minus.z_hi - sp.minus.z_lo == Approx(2.0 * (sp.K0hat + 1.0) * mu));
  CHECK(sp.plus.z_hi / sp.plus.z_lo == Approx(100.0 * std::exp(1.5 * sp.beta * sp.L_plus)).epsilon(1e-12));
  const SectionPair half = sp.with_mu(mu / 2);
  CHECK(half.minus.z_hi == Approx(sp.minus.z_hi / 2));
  CHECK(half.plus.z_lo == Approx(sp.plus.z_lo / 2));
  CHECK(half.minus.base.x == sp.minus.base.x);
}

TEST_CASE("section chart round trip and transversality") {
  const SectionPair sp = setup().sections(1e-6);
  for (const SectionSpec* sec : {&sp.minus, &sp.plus}) {
    CHECK(dot(sec->normal, sec->tangent) == Approx(0.0).epsilon(1e-15));
    CHECK(norm(sec->normal) == Approx(1.0));
    for (double z : {-3e-6, 0.0, 2.5e-6}) CHECK(sec->chart(sec->point(z)) == Approx(z).epsilon(1e-12));
    CHECK(sec->section().g(sec->point(1e-3)) == Approx(0.0).epsilon(1e-14));
  }
  CHECK(sp.minus.anchor_s < 0.0);
  CHECK(sp.plus.anchor_s > 0.0);
}

TEST_CASE("negative -rho A is a sign error") {
  const Setup& s = setup();
  WaveCoefficients w = s.waves;
  w.K1 = -w.K1;
  CHECK_THROWS_AS(build_sections(s.orbit, 1e-6, w, 1.0), NumericFailure);
  CHECK_THROWS_AS(build_sections(s.orbit, -1.0, s.waves, 1.0), std::invalid_argument);
}

TEST_CASE("periodic orbit of the forced linear saddle") {
  VectorFieldSpec f = fixtures::linear_saddle(2.0, 1.0);
  f.mu = 1e-3;
  f.omega = 2.0;
  const PeriodicOrbit po = periodic_orbit(f, {0.0, 0.0});
  CHECK(po.residual < 1e-12);
  // x' = -2x - mu sin, y' = y + mu sin: amplitude mu / sqrt(4 + w^2) and mu / sqrt(1 + w^2)
  const double ax = 1e-3 / std::sqrt(8.0), ay = 1e-3 / std::sqrt(5.0);
  CHECK(po.max_deviation <= std::hypot(ax, ay) * (1.0 + 1e-6));
  CHECK(po.max_deviation >= std::max(ax, ay));
  CHECK(estimate_K0hat(f, {0.0, 0.0}, 1e-3) == Approx(po.max_deviation / 1e-3));
}

TEST_CASE("M-stage image within the predicted range") {
  const Setup& s = setup();
  const double mu = 1e-6;
  const SectionPair sp = s.sections(mu);
  const std::vector<double> Z0s{-sp.K0hat - 1.0, 0.0, sp.K0hat + 1.0};
  const std::vector<double> thetas{0.0, 1.5, 3.0, 4.5};
  const MStageReport r = m_stage_check(s.field.with_mu(mu), sp, s.waves, s.window, Z0s, thetas);
  CHECK(r.all_returned);
  CHECK(r.all_in_plus_range);
  CHECK(r.max_relative_error < 1e-3);
  CHECK(r.pass());
  REQUIRE(r.samples.size() == 12);
  CHECK(r.samples[5].Z0 == 0.0);
  CHECK(r.samples[5].theta0 == 1.5);
  for (const ReturnSample& x : r.samples) {
    CHECK(x.status == ReturnStatus::Ok);
    CHECK(x.in_minus_range);
  }
}

TEST_CASE("inner passage time grows by ln 2 / beta when mu halves") {
  const Setup& s = setup();
  const SectionPair sp = s.sections(1e-6);
  const ReturnSample a = return_map_flow(s.field.with_mu(1e-6), sp, 0.0, 0.7);
  const ReturnSample b = return_map_flow(s.field.with_mu(5e-7), sp.with_mu(5e-7), 0.0, 0.7);
  REQUIRE(a.returned);
  REQUIRE(b.returned);
  CHECK(b.t_N - a.t_N == Approx(std::log(2.0) / s.field.beta).epsilon(0.02));
  CHECK(b.t_M == Approx(a.t_M).epsilon(1e-4));
}

TEST_CASE("unforced return is flagged") {
  const Setup& s = setup();
  const SectionPair sp = s.sections(1e-6).with_mu(0.0);
  const ReturnSample r = return_map_flow(s.field.with_mu(0.0), sp, 0.0, 0.0);
  CHECK(r.reached_plus);
  CHECK_FALSE(r.in_plus_range);
  CHECK(r.status == ReturnStatus::OutsidePlusRange);
  CHECK(to_string(r.status) == "outside-plus-range");
}

TEST_CASE("analytic prediction") {
  const Setup& s = setup();
  const Prediction p = analytic_prediction(0.0, 0.0, 1e-6, s.waves, s.window);
  CHECK(p.Z_hat == Approx(s.waves.K1 * (1.0 + s.waves.c2)));
  CHECK(p.X1 == Approx(1e-6 / 0.05 * p.Z_hat * p.Z_hat).epsilon(1e-12));
  WaveCoefficients bad = s.waves;
  bad.K1 = -1.0;
  CHECK_THROWS_AS(analytic_prediction(0.0, 0.0, 1e-6, bad, s.window), NumericFailure);
}

TEST_CASE("passage time regression") {
  const Setup& s = setup();
  const SectionPair sp = s.sections(1e-5);
  const std::vector<double> mus{1e-5, 3e-6, 1e-6, 3e-7, 1e-7, 3e-8, 1e-8};
  const PassageReport r = passage_time_check(s.field, sp, mus);
  CHECK(r.slope * s.field.beta == Approx(1.0).epsilon(0.01));
  CHECK(r.slope_ok);
  CHECK_FALSE(r.trend_flag);
  CHECK(r.escape_ok);
  CHECK(r.K4 <= r.K5);
  CHECK(r.pass());
  // e^{-alpha t_N} / mu is only small once mu is: at eps = 0.05 it exceeds 1 near mu = 1e-4
  CHECK_FALSE(passage_time_check(s.field, sp, {1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7, 1e-7}).escape_ok);
  CHECK_THROWS_AS(passage_time_check(s.field, sp, {1e-4, 1e-5, 1e-6, 1e-7}), NumericFailure);
  CHECK_THROWS_AS(passage_time_check(s.field, sp, {1e-4, 5e-5, 3e-5, 2e-5, 1e-5}), NumericFailure);
}
