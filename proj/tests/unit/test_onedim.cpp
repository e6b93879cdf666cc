#include <cmath>

#include "doctest.h"
#include "rankone/as_model.hpp"
#include "rankone/onedim.hpp"

using namespace rankone;
using doctest::Approx;

namespace {

CircleMap sine_map(double K, double shift = 0.0) {
  CircleMap m;
  m.f = [=](double t) { return t + K * std::sin(t - shift); };
  m.df = [=](double t) { return 1.0 + K * std::cos(t - shift); };
  m.d2f = [=](double t) { return -K * std::sin(t - shift); };
  m.d3f = [=](double t) { return -K * std::cos(t - shift); };
  m.name = "sine";
  return m;
}

CircleMap doubling() {
  CircleMap m;
  m.f = [](double t) { return 2.0 * t; };
  m.df = [](double) { return 2.0; };
  m.d2f = [](double) { return 0.0; };
  m.d3f = [](double) { return 0.0; };
  m.name = "doubling";
  return m;
}

ASParams fast(double amp = 0.3) {
  ASParams p;
  p.omega = 100.0;
  p.A_amp = amp;
  return p;
}

}  // namespace

TEST_CASE("critical sets") {
  CHECK(critical_set(sine_map(0.0)).empty());
  const auto cps = critical_set(sine_map(2.0));
  REQUIRE(cps.size() == 2);
  CHECK(cps[0].theta == Approx(std::acos(-0.5)).epsilon(1e-12));
  CHECK(cps[1].theta == Approx(kTwoPi - std::acos(-0.5)).epsilon(1e-12));
  ASParams p = fast();
  p.omega = 40.0;
  const auto as = critical_set(circle_map(p, 1.0));
  REQUIRE(as.size() == 2);
  for (const auto& c : as) {
    CHECK_FALSE(c.degenerate);
    CHECK(std::abs(c.d2f) > 1e-3);
  }
  CHECK_THROWS_AS(critical_set(sine_map(2.0), 100), std::invalid_argument);
}

TEST_CASE("doubling map: uniform expansion, critical conditions vacuous") {
  const MisiurewiczReport r = verify_misiurewicz(doubling(), 0.1, 60);
  CHECK(r.critical_points.empty());
  CHECK(r.cond1a);
  CHECK(r.lambda0 == Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(r.cond2a);
  CHECK(r.cond2b);
  CHECK(r.cond2c);
  CHECK(r.horizon == 60);
}

TEST_CASE("as-model circle map: lambda0 above ln 10 at a landing parameter") {
  const ASParams p = fast();
  const CircleFamily fam = [p](double a) { return circle_map(p, a); };
  const auto landings = landing_parameters(fam, 0, 0.0, kTwoPi);
  REQUIRE_FALSE(landings.empty());
  MisiurewiczOptions o;
  o.M0 = 30;
  o.grid_log2 = 14;
  bool found = false;
  for (double a : landings) {
    const MisiurewiczReport r = verify_misiurewicz(circle_map(p, a), 0.03, 100, o);
    if (r.lambda0 > std::log(10.0) && r.cond2b) {
      found = true;
      CHECK(r.horizon == 100);
      CHECK(r.critical_landing_period[0] >= 1);
      break;
    }
  }
  CHECK(found);
}

TEST_CASE("oversized critical neighborhood is rejected") {
  CHECK_THROWS_AS(verify_misiurewicz(circle_map(fast(), 1.0), 2.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(verify_misiurewicz(circle_map(fast(), 1.0), 0.01, 10), std::invalid_argument);
}

TEST_CASE("critical points do not move in t + a + K Psi") {
  const Potential psi = log_potential(0.18, 0.24);
  const double K = 30.0;
  const CircleFamily fam = [=](double a) {
    CircleMap m;
    m.f = [=](double t) { return t + a + K * psi.psi(t); };
    m.df = [=](double t) { return 1.0 + K * psi.dpsi(t); };
    m.d2f = [=](double t) { return K * psi.d2psi(t); };
    m.d3f = [=](double t) {
      const double h = 1e-4;
      return K * (psi.d2psi(t + h) - psi.d2psi(t - h)) / (2 * h);
    };
    return m;
  };
  const auto c0 = critical_angles(critical_set(fam(0.0)));
  const auto c1 = critical_angles(critical_set(fam(1.7)));
  REQUIRE(c0.size() == c1.size());
  for (std::size_t i = 0; i < c0.size(); ++i) CHECK(c0[i] == Approx(c1[i]).epsilon(1e-12));
  // f_a(c) moves with unit speed in a
  CHECK(fam(0.3).f(c0[0]) - fam(0.2).f(c0[0]) == Approx(0.1).epsilon(1e-12));
}

TEST_CASE("transversality is stable under step halving") {
  const ASParams p = fast();
  const CircleFamily fam = [p](double a) { return circle_map(p, a); };
  // at a landing parameter the critical orbit stays on a repelling cycle
  const double a_star = landing_parameters(fam, 0, 0.0, kTwoPi).at(0);
  const double c = critical_angles(critical_set(fam(a_star)))[0];
  const TransversalityResult r1 = transversality(fam, a_star, c, 1e-6);
  const TransversalityResult r2 = transversality(fam, a_star, c, 5e-7);
  CHECK(r1.nonzero);
  CHECK(r2.xi == Approx(r1.xi).epsilon(0.05));
}

TEST_CASE("rotation-conjugate family keeps its critical relation: xi = 0") {
  // f_a = R_a g R_{-a}: every orbit relation is carried along with a
  const CircleFamily fam = [](double a) { return sine_map(20.0, a); };
  const double c = critical_angles(critical_set(fam(0.5)))[0];
  const TransversalityResult r = transversality(fam, 0.5, c, 1e-5);
  CHECK(std::abs(r.xi) < 1e-6);
  CHECK_FALSE(r.nonzero);
}

TEST_CASE("precheck of the logarithmic potential") {
  const double c1 = 0.18, c2 = 0.24;  // amplitude 0.3
  const PropFamilyReport r = check_prop_family(log_potential(c1, c2), {}, 100.0);
  CHECK(r.phi_c3_norm == 0.0);
  CHECK(r.phi_small);
  REQUIRE(r.psi_critical.size() == 2);
  for (double t : r.psi_critical) CHECK(std::tan(t) == Approx(c1 / c2).epsilon(1e-9));
  CHECK(r.psi_nondegenerate);
  CHECK(r.K_exceeds);
  CHECK(r.pass());
  CHECK_FALSE(r.amplitude_warning);

  const PropFamilyReport wide = check_prop_family(log_potential(0.6, 0.0), {}, 100.0);
  CHECK(wide.amplitude_warning);

  const PropFamilyReport loud = check_prop_family(
      log_potential(c1, c2), [](double t, double a) { return 0.1 * std::sin(t + a); }, 100.0);
  CHECK_FALSE(loud.phi_small);
}
