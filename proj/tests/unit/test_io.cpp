#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rankone/fixtures.hpp"
#include "rankone/io.hpp"

using namespace rankone;
using doctest::Approx;

TEST_CASE("FNV-1a reference values") {
  CHECK(io::fingerprint("") == "cbf29ce484222325");
  CHECK(io::fingerprint("a") == "af63dc4c8601ec8c");
  CHECK(io::fingerprint("foobar") == "85944171f73967e8");
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0, 1e-6}) {
    CHECK(io::parse_double(io::shortest(v)) == v);
    CHECK(io::parse_double(io::sig17(v)) == v);
  }
  CHECK(io::shortest(0.1) == "0.1");
  CHECK(std::isinf(io::parse_double("inf")));
  CHECK(std::isnan(io::parse_double("nan")));
  CHECK_THROWS(io::parse_double("1.5x"));
}

TEST_CASE("CSV with metadata") {
  io::CsvTable t;
  t.meta["k"] = "v w";
  t.header = {"x", "y"};
  t.rows = {{1.0, 0.1}, {-3.0, 1.0 / 3.0}};
  std::stringstream ss;
  io::write_csv(ss, t, true);
  CHECK(ss.str().rfind("# k=v w\n", 0) == 0);
  CHECK(ss.str().find('\r') == std::string::npos);
  const io::CsvTable r = io::read_csv(ss);
  CHECK(r.meta.at("k") == "v w");
  CHECK(r.header == t.header);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1][1] == 1.0 / 3.0);
  CHECK(r.column("y") == 1);
  CHECK_THROWS(r.column("z"));
}

TEST_CASE("orbit CSV round trip") {
  const auto gl = fixtures::glued_loop();
  const SaddleInfo sd = locate_saddle(gl.field, {0.01, -0.02});
  HomoclinicOrbit o = compute_homoclinic(gl.field, sd, 0.1, 1e-9);
  frames_and_E(o, gl.field);
  std::stringstream ss;
  io::write_orbit_csv(ss, o);
  const HomoclinicOrbit r = io::read_orbit_csv(ss);
  REQUIRE(r.size() == o.size());
  CHECK(r.breaks == o.breaks);
  CHECK(r.L_minus == o.L_minus);
  CHECK(r.L_plus == o.L_plus);
  CHECK(r.epsilon == o.epsilon);
  CHECK(r.connected == o.connected);
  CHECK(r.alpha == o.alpha);
  CHECK(r.beta == o.beta);
  for (std::size_t i = 0; i < o.size(); i += 97) {
    CHECK(r.s[i] == o.s[i]);
    CHECK(r.ell[i].x == o.ell[i].x);
    CHECK(r.tangent[i].y == o.tangent[i].y);
    CHECK(r.E[i] == o.E[i]);
  }
}

TEST_CASE("Melnikov JSON round trip") {
  MelnikovData d;
  d.A = 0.1;
  d.C = 1.0 / 3.0;
  d.S = -2.0 / 7.0;
  d.A_L = 0.1 + 1e-17;
  d.omega = 5.0;
  d.rho1 = -1.2;
  d.rho2 = -0.7;
  const std::string js = io::to_json(d, nullptr, "abc");
  CHECK(nlohmann::json::parse(js).at("config_fingerprint") == "abc");
  const MelnikovData r = io::melnikov_from_json(js);
  CHECK(r.A == d.A);
  CHECK(r.C == d.C);
  CHECK(r.S == d.S);
  CHECK(r.A_L == d.A_L);
  CHECK(r.rho2 == d.rho2);
}

TEST_CASE("scan records as JSON lines and CSV rows") {
  ScanRecord rec;
  rec.index = 3;
  rec.point.mu = 1e-6;
  rec.point.family = "as-model";
  rec.lambda1 = 0.25;
  rec.cls = AttractorClass::Chaotic;
  const std::string line = io::to_json_line(rec);
  CHECK(line.find('\n') == std::string::npos);
  const auto j = nlohmann::json::parse(line);
  CHECK(j.at("lambda1") == 0.25);
  CHECK(io::scan_row(rec).size() == io::scan_columns().size());
  const io::CsvTable t = io::scan_table({rec, rec});
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[0][t.column("lambda1")] == 0.25);

  const std::string summary = io::to_json(summarize({rec}));
  CHECK(summary.find("does not certify") != std::string::npos);
}

TEST_CASE("ranges") {
  CHECK(io::Range{1.0, 3.0, 3}.values() == std::vector<double>{1.0, 2.0, 3.0});
  const auto lg = io::Range{1e-8, 1e-4, 5}.values(true);
  REQUIRE(lg.size() == 5);
  CHECK(lg[2] == Approx(1e-6).epsilon(1e-12));
  CHECK(io::Range{7.0, 9.0, 1}.values() == std::vector<double>{7.0});
}

TEST_CASE("config canonical form round-trips and fingerprints") {
  io::RunConfig c;
  c.system = "cubic";
  c.cubic_nu = 1.0 / 3.0;
  c.mu = {1e-8, 1e-5, 7};
  c.as.omega = 42.5;
  c.seed = 99;
  c.validate();
  const io::RunConfig r = io::parse_config(c.canonical());
  CHECK(r.canonical() == c.canonical());
  CHECK(r.cubic_nu == c.cubic_nu);
  CHECK(r.mu.count == 7);
  CHECK(r.fingerprint() == c.fingerprint());

  io::RunConfig moved = c;
  moved.out_dir = "elsewhere";
  moved.threads = 4;
  CHECK(moved.fingerprint() == c.fingerprint());
  io::RunConfig other = c;
  other.seed = 100;
  CHECK(other.fingerprint() != c.fingerprint());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(io::parse_config("[numerics]\nbogus = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_config("[nowhere]\nx = 1\n"), std::invalid_argument);
  io::RunConfig c;
  c.mu = {1e-6, 1e-3, 2};  // 0.1 eps^2 = 2.5e-4
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.system = "as-model";
  CHECK_NOTHROW(c.validate());
  c = io::RunConfig{};
  c.system = "lorenz";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = io::RunConfig{};
  c.iterations = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  const io::RunConfig partial = io::parse_config("[numerics]\nepsilon = 0.1\n");
  CHECK(partial.epsilon == 0.1);
  CHECK(partial.system == "glued-loop");
}

TEST_CASE("configured fields") {
  io::RunConfig c;
  c.system = "linear";
  const VectorFieldSpec f = io::configured_field(c);
  CHECK(f.unforced({1.0, 1.0}).x == Approx(-2.0));
  c.system = "as-model";
  CHECK_THROWS(io::configured_field(c));
}
