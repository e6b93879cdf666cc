#include <cmath>

#include "doctest.h"
#include "rankone/fixtures.hpp"
#include "rankone/homoclinic.hpp"

using namespace rankone;
using doctest::Approx;

namespace {

struct Loop {
  fixtures::GluedLoop gl = fixtures::glued_loop();
  SaddleInfo saddle;
  HomoclinicOrbit orbit;

  explicit Loop(double eps) {
    saddle = locate_saddle(gl.field, {0.01, -0.02});
    orbit = compute_homoclinic(gl.field, saddle, eps, 1e-9);
    frames_and_E(orbit, gl.field);
  }
};

const Loop& loop05() {
  static const Loop l(0.05);
  return l;
}

}  // namespace

TEST_CASE("saddle of the linear field") {
  const SaddleInfo s = locate_saddle(fixtures::linear_saddle(2.0, 1.0), {0.01, -0.02});
  CHECK(norm(s.position) < 1e-14);
  CHECK(s.alpha == Approx(2.0));
  CHECK(s.beta == Approx(1.0));
  CHECK(std::abs(s.eigvec_stable.x) == Approx(1.0));
  CHECK(std::abs(s.eigvec_unstable.y) == Approx(1.0));
}

TEST_CASE("saddle of the cubic fixture has eigenvalues +-1") {
  // p' = q, q' = p - p^2 has Jacobian [[0, 1], [1, 0]] at the origin
  const SaddleInfo s = locate_saddle(fixtures::cubic(0.0), {0.02, -0.01});
  CHECK(norm(s.position) < 1e-12);
  CHECK(s.alpha == Approx(1.0).epsilon(1e-10));
  CHECK(s.beta == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("a center is rejected") {
  try {
    locate_saddle(fixtures::rotation(), {0.0, 0.0});
    FAIL("expected not-a-saddle");
  } catch (const NumericFailure& e) {
    CHECK(e.kind() == FailureKind::NotASaddle);
  }
}

TEST_CASE("H1 enumeration") {
  const H1Report resonant = check_H1(2.0, 1.0, 0.1, 2.0, 10);
  CHECK_FALSE(resonant.diophantine_pass);
  CHECK(resonant.worst_m == 1);
  CHECK(resonant.worst_n == 2);
  CHECK(resonant.worst_value == 0.0);
  CHECK(resonant.search_depth == 10);

  const H1Report irrational = check_H1(std::sqrt(2.0), 1.0, 0.01, 2.0, 50);
  CHECK(irrational.dissipative);
  CHECK(irrational.diophantine_pass);

  CHECK_FALSE(check_H1(1.0, 2.0, 0.01, 2.0, 10).dissipative);
}

TEST_CASE("glued loop closes and follows the prescribed curve") {
  const Loop& l = loop05();
  CHECK(l.orbit.connected);
  CHECK(l.orbit.closure_residual < 1e-9);
  double worst = 0.0;
  for (Vec2 p : l.orbit.ell) worst = std::max(worst, l.gl.distance_to_loop(p));
  CHECK(worst < 1e-6);
}

TEST_CASE("orbit samples solve the unforced equation with unit tangents") {
  const Loop& l = loop05();
  const HomoclinicOrbit& o = l.orbit;
  REQUIRE(o.breaks.size() == 5);
  double worst_tangent = 0.0, worst_residual = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    worst_tangent = std::max(worst_tangent, std::abs(norm(o.tangent[i]) - 1.0));
    const Vec2 v = l.gl.field.unforced(o.ell[i]);
    worst_residual = std::max(worst_residual, std::abs(cross(v / norm(v), o.tangent[i])));
  }
  CHECK(worst_tangent < 1e-12);
  CHECK(worst_residual < 1e-8);
  // finite differences of the samples against the field in the middle sub-grid
  const std::size_t i = (o.zero_index() + o.plus_index()) / 2;
  const double ds = o.s[i + 1] - o.s[i - 1];
  const Vec2 fd = (o.ell[i + 1] - o.ell[i - 1]) / ds;
  CHECK(norm(fd - l.gl.field.unforced(o.ell[i])) < 1e-5 * norm(fd));
}

TEST_CASE("window ends lie between eps/2 and 2 eps from the saddle") {
  const HomoclinicOrbit& o = loop05().orbit;
  for (std::size_t idx : {o.minus_index(), o.plus_index()}) {
    const double r = norm(o.ell[idx] - o.saddle);
    CHECK(r >= 0.5 * o.epsilon);
    CHECK(r <= 2.0 * o.epsilon);
  }
  CHECK(o.s[o.minus_index()] == Approx(-o.L_minus));
  CHECK(o.s[o.plus_index()] == Approx(o.L_plus));
}

TEST_CASE("linear saddle has no loop") {
  const VectorFieldSpec f = fixtures::linear_saddle(2.0, 1.0);
  try {
    compute_homoclinic(f, locate_saddle(f, {0.0, 0.0}), 0.05, 1e-9);
    FAIL("expected no-loop");
  } catch (const NumericFailure& e) {
    CHECK(e.kind() == FailureKind::NoLoop);
  }
}

TEST_CASE("detuned cubic connection is flagged") {
  auto residual = [](double nu) {
    const VectorFieldSpec f = fixtures::cubic(nu);
    const HomoclinicOrbit o = compute_homoclinic(f, locate_saddle(f, {0.01, 0.01}), 0.1, 1e-9);
    CHECK_FALSE(o.connected);
    return o.closure_residual;
  };
  const double r1 = residual(1e-2), r2 = residual(5e-3);
  CHECK(r1 > 1e-3);
  CHECK(r1 < 0.3);
  // splitting is first order in the detuning
  CHECK(r1 / r2 == Approx(2.0).epsilon(0.15));
}

TEST_CASE("tuned cubic connection closes") {
  const VectorFieldSpec f = fixtures::cubic(0.0);
  const HomoclinicOrbit o = compute_homoclinic(f, locate_saddle(f, {0.01, 0.01}), 0.1, 1e-6);
  CHECK(o.connected);
}

TEST_CASE("normal expansion rate on the axis legs and the diagonal") {
  const Loop& l = loop05();
  const HomoclinicOrbit& o = l.orbit;
  // deep in both tails the orbit runs along the axes of the linear region
  const std::size_t first = 0, last = o.size() - 1;
  CHECK(std::abs(o.tangent[first].x) < 1e-6);
  CHECK(o.E[first] == Approx(-2.0).epsilon(1e-6));
  CHECK(std::abs(o.tangent[last].y) < 1e-6);
  CHECK(o.E[last] == Approx(1.0).epsilon(1e-6));
  // 45 degree tangent in a linear field: e J e^T = (-alpha + beta) / 2
  HomoclinicOrbit diag;
  diag.s = {0.0};
  diag.ell = {{0.01, 0.01}};
  diag.tangent = {{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}};
  const Mat2 J = l.gl.field.unforced_jacobian({0.01, 0.01});
  const Vec2 e{diag.tangent[0].y, -diag.tangent[0].x};
  CHECK(dot(e, J * e) == Approx((-2.0 + 1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("asymptotic rates of the glued loop") {
  const Loop& l = loop05();
  const AsymptoticsReport a = check_asymptotics(l.orbit, l.saddle);
  CHECK(a.forward_slope == Approx(-2.0).epsilon(0.05));
  CHECK(a.backward_slope == Approx(-1.0).epsilon(0.05));
  CHECK(a.forward_ok);
  CHECK(a.backward_ok);
  CHECK(a.backward_partial_spread < 1e-3);
  CHECK(a.backward_partial_ok);
  CHECK(a.E_tail_rate == Approx(1.0).epsilon(1e-6));
  CHECK(a.E_integral_ok);
}

TEST_CASE("input validation") {
  const Loop& l = loop05();
  CHECK_THROWS_AS(compute_homoclinic(l.gl.field, l.saddle, 0.0, 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(compute_homoclinic(l.gl.field.with_mu(1e-3), l.saddle, 0.05, 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(check_H1(2.0, 1.0, 0.1, 2.0, 1), std::invalid_argument);
}
