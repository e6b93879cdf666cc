#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "rankone/as_model.hpp"
#include "rankone/onedim.hpp"

using namespace rankone;
using doctest::Approx;

namespace {

ASParams unit_freq() {
  ASParams p;
  p.epsilon = 0.1;
  p.omega = 1.0;  // omega = beta
  return p;
}

}  // namespace

TEST_CASE("N: passage near the saddle") {
  const ASParams p = unit_freq();
  const auto [x1, th1] = map_N(0.01, 0.0, p);
  CHECK(x1 == Approx(1e-3).epsilon(1e-14));
  CHECK(th1 == Approx(std::log(10.0)).epsilon(1e-14));

  const auto [xe, the] = map_N(p.epsilon, 1.234, p);
  CHECK(xe == Approx(p.epsilon));
  CHECK(the == Approx(1.234));

  const double a = map_N(0.004, 0.0, p).first, b = map_N(0.002, 0.0, p).first;
  CHECK(b / a == Approx(std::pow(2.0, -p.ratio())).epsilon(1e-14));

  CHECK_THROWS_AS(map_N(0.0, 0.0, p), std::domain_error);
}

TEST_CASE("M: excursion along the loop") {
  ASParams p;
  p.lambda = 0.5;
  p.mu = 1e-3;
  p.B = 1.0;
  p.A_amp = 0.5;
  p.xi2 = 0.0;  // the phase shift mu xi2 is checked separately below
  const auto [y, th] = map_M(0.0, 0.0, p);
  CHECK(y == Approx(1e-3));
  CHECK(th == Approx(wrap_angle(p.xi1)));
  CHECK(map_M(0.0, kPi / 2, p).first == Approx(p.mu * p.B * (1.0 + p.A_amp)));
  for (double t = 0.0; t < kTwoPi; t += 0.1) CHECK(map_M(0.0, t, p).first <= map_M(0.0, kPi / 2, p).first);

  p.xi2 = 0.7;
  CHECK(map_M(0.0, 0.0, p).second == Approx(wrap_angle(p.xi1 + p.mu * 0.7)).epsilon(1e-15));

  p.mu = 0.0;
  const auto [y0, th0] = map_M(0.3, 1.0, p);
  CHECK(y0 == Approx(0.15));
  CHECK(th0 == Approx(wrap_angle(1.0 + p.xi1)));
}

namespace {

// Largest |F - N(M)| over 1000 random states, and the largest phase advance seen.
std::pair<double, double> composition_gap(const ASParams& p) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> X(0.0, 2.0), T(0.0, kTwoPi);
  double worst = 0.0, advance = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ASState s{X(rng), T(rng)};
    const auto [y, th] = map_M(p.mu * s.X, s.theta, p);
    const auto [x1, th1] = map_N(y, th, p);
    const ASState f = map_F(s, p);
    worst = std::max({worst, std::abs(f.X - x1 / p.mu), circle_distance(f.theta, th1)});
    advance = std::max(advance, std::abs(map_F_lifted(s, p).theta - s.theta));
  }
  return {worst, advance};
}

}  // namespace

TEST_CASE("F is N after M in rescaled coordinates") {
  ASParams slow;
  slow.omega = slow.beta;
  CHECK(composition_gap(slow).first < 1e-13);
  // at omega/beta = 100 the phase advance is several hundred radians; both sides
  // round it separately, so the bound is a few ulps of the advance
  const auto [worst, advance] = composition_gap(ASParams{});
  CHECK(advance > 100.0);
  CHECK(worst < 4.0 * advance * std::numeric_limits<double>::epsilon());
}

TEST_CASE("X1 scales like mu^(alpha/beta - 1)") {
  ASParams p;
  const ASState s{0.7, 2.0};
  const double a = map_F(s, p).X;
  const double b = map_F(s, p.with_mu(p.mu / 10.0)).X;
  CHECK(b / a == Approx(0.1).epsilon(1e-12));
}

TEST_CASE("Jacobian and log det against finite differences") {
  const ASParams p;
  for (const ASState s : {ASState{0.3, 0.4}, ASState{1.7, 4.0}, ASState{0.0, 5.5}}) {
    const Mat2 J = jacobian_F(s, p);
    const double h = 1e-6;
    const ASState xp = map_F_lifted({s.X + h, s.theta}, p), xm = map_F_lifted({s.X - h, s.theta}, p);
    const ASState tp = map_F_lifted({s.X, s.theta + h}, p), tm = map_F_lifted({s.X, s.theta - h}, p);
    const Mat2 fd{(xp.X - xm.X) / (2 * h), (tp.X - tm.X) / (2 * h), (xp.theta - xm.theta) / (2 * h),
                  (tp.theta - tm.theta) / (2 * h)};
    const double scale = std::abs(J.a11) + std::abs(J.a12) + std::abs(J.a21) + std::abs(J.a22);
    CHECK(std::abs(fd.a11 - J.a11) < 1e-6 * scale);
    CHECK(std::abs(fd.a12 - J.a12) < 1e-6 * scale);
    CHECK(std::abs(fd.a21 - J.a21) < 1e-6 * scale);
    CHECK(std::abs(fd.a22 - J.a22) < 1e-6 * scale);
    CHECK(log_det_F(s, p) == Approx(std::log(std::abs(J.det()))).epsilon(1e-10));
  }
}

TEST_CASE("family reparametrization") {
  const ASParams p;
  for (int n : {1, 2, 7}) {
    const FamilyIndex a0 = reparametrize(p, n, 0.0);
    CHECK(a0.mu_na == a0.b_n);
    const FamilyIndex a = reparametrize(p, n, 1.3);
    CHECK(gamma_of(a.mu_na, p) - gamma_of(a.b_n, p) == Approx(1.3).epsilon(1e-12));
    const FamilyIndex next = reparametrize(p, n + 1, 0.0);
    CHECK(next.b_n / a0.b_n == Approx(std::exp(-kTwoPi * p.beta / p.omega)).epsilon(1e-13));
  }
  CHECK(family_offset(p) > p.frequency_ratio() * std::log(1.0 / p.mu0));
}

TEST_CASE("singular limit: theta discrepancy is mu xi2 modulo 2 pi") {
  const ASParams p;
  for (int n : {1, 20, 60}) {
    const double b = reparametrize(p, n, 0.0).b_n;
    const double mu = family_mu(p, 0.8, b);
    const ASState s{0.5, 1.0};
    const ASState f = family_map_lifted(p, 0.8, b, s);
    const double d = wrap_pi(f.theta - singular_theta(p, 0.8, s.X, s.theta));
    // remainder is O(mu^(alpha/beta - 1)) from the X-dependence inside the log
    CHECK(std::abs(d - mu * p.xi2) < 50.0 * mu);
  }
}

TEST_CASE("circle map derivative") {
  ASParams p;
  p.omega = 100.0;
  const CircleMap f = circle_map(p, 0.4);
  for (double t = 0.05; t < kTwoPi; t += 0.3) {
    const double h = 1e-6;
    CHECK(f.df(t) == Approx((f.f(t + h) - f.f(t - h)) / (2 * h)).epsilon(1e-7));
    CHECK(f.df(t) == Approx(1.0 - 100.0 * p.A_amp * std::cos(t) / (1.0 + p.A_amp * std::sin(t))));
  }
  CHECK(critical_set(f, 10000).size() == 2);
}

TEST_CASE("zero amplitude gives a rigid rotation") {
  ASParams p;
  p.A_amp = 0.0;
  const CircleMap f = circle_map(p, 0.4);
  for (double t = 0.0; t < kTwoPi; t += 0.5) CHECK(f.df(t) == 1.0);
  CHECK(critical_set(f).empty());
}

TEST_CASE("parameter validation") {
  ASParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 3.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ASParams{};
  p.A_amp = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
