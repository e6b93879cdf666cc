#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pipeline.hpp"

using namespace rankone;
using rankone::cli::Output;

namespace {

constexpr int kValidationFailure = 2;
constexpr int kNumericFailure = 3;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> tol;
};

io::RunConfig resolve(const Flags& f) {
  io::RunConfig c = f.config.empty() ? io::RunConfig{} : io::load_config(f.config);
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  if (f.tol) c.tol = *f.tol;
  c.validate();
  return c;
}

Output output_for(const io::RunConfig& c) {
  Output out(c.out_dir, c.fingerprint());
  out.text("config.ini", c.canonical());
  return out;
}

ASParams as_params(const io::RunConfig& c) {
  c.as.validate();
  return c.as;
}

std::vector<int> n_ladder(const io::RunConfig& c) {
  std::vector<int> ns;
  for (int n = c.n_lo; n <= c.n_hi; ++n) ns.push_back(n);
  return ns;
}

// A full turn is sampled half-open so 0 and 2 pi are not both visited.
std::vector<double> angles(const io::Range& r) {
  if (r.count > 1 && r.hi - r.lo >= kTwoPi - 1e-12) {
    std::vector<double> v;
    for (int i = 0; i < r.count; ++i) v.push_back(r.lo + (r.hi - r.lo) * i / r.count);
    return v;
  }
  return r.values();
}

void say(const std::string& line) { std::cout << line << '\n'; }

// ---- commands ----

int cmd_homoclinic(const io::RunConfig& c) {
  const Output out = output_for(c);
  const VectorFieldSpec field = io::configured_field(c);
  const SaddleInfo saddle = cli::configured_saddle(c, field);
  const HomoclinicOrbit orbit = cli::configured_orbit(c, field, saddle);
  const H1Report h1 = check_H1(saddle.alpha, saddle.beta, c.h1_d1, c.h1_d2, c.h1_depth);
  std::ofstream os(out.path("orbit.csv"), std::ios::binary);
  io::write_orbit_csv(os, orbit, {{"config_fingerprint", out.fingerprint()}});
  out.text("h1.json", io::to_json(h1, orbit, out.fingerprint()));
  say("closure_residual " + io::shortest(orbit.closure_residual));
  if (!h1.dissipative || !h1.diophantine_pass)
    std::cerr << "warning: H1 fails (m=" << h1.worst_m << ", n=" << h1.worst_n
              << ", depth " << h1.search_depth << "); continuing at user risk\n";
  return 0;
}

int cmd_melnikov(const io::RunConfig& c) {
  const Output out = output_for(c);
  const cli::LoopSetup s = cli::loop_setup(c);
  out.text("melnikov.json", io::to_json(s.melnikov, &s.waves, out.fingerprint()));
  say("A " + io::shortest(s.melnikov.A) + " C " + io::shortest(s.melnikov.C) + " S " +
      io::shortest(s.melnikov.S));
  say("rho " + io::shortest(s.rho) + " amplitude " + io::shortest(s.waves.amplitude));
  return 0;
}

int cmd_asmap_iterate(const io::RunConfig& c) {
  const Output out = output_for(c);
  const ASParams p = as_params(c);
  const Map2D map = as_map(p);
  ASState s = random_starts(map, 1, c.seed).front();
  io::CsvTable t;
  t.header = {"step", "X", "theta"};
  t.meta["seed"] = std::to_string(c.seed);
  t.rows.push_back({0.0, s.X, s.theta});
  for (std::size_t i = 1; i <= c.iterations; ++i) {
    s = map_F(s, p);
    t.rows.push_back({static_cast<double>(i), s.X, s.theta});
  }
  out.csv("iterates.csv", std::move(t));
  say("iterations " + std::to_string(c.iterations));
  return 0;
}

ClassifyOptions classify_options(const io::RunConfig& c) {
  ClassifyOptions o;
  o.n = c.iterations;
  o.transient = c.transient;
  o.seeds = c.seeds;
  o.seed = c.seed;
  return o;
}

int run_scan(const io::RunConfig& c, const MapFactory& factory, const std::vector<ScanPoint>& grid) {
  const Output out = output_for(c);
  std::ofstream lines(out.path("scan.jsonl"), std::ios::binary);
  lines << nlohmann::json{{"config_fingerprint", out.fingerprint()}, {"seed", c.seed}}.dump() << '\n';
  const auto records = scan(
      factory, grid, classify_options(c), [&](const ScanRecord& r) { lines << io::to_json_line(r) << '\n' << std::flush; },
      c.threads);
  out.csv("scan.csv", io::scan_table(records));
  io::CsvTable plot;
  plot.header = {"mu", "a", "omega", "lambda1"};
  for (const auto& r : records) plot.rows.push_back({r.point.mu, r.point.a, r.point.omega, r.lambda1});
  out.csv("lambda1.csv", std::move(plot));
  const ScanSummary sum = summarize(records);
  out.text("summary.json", io::to_json(sum, out.fingerprint()));
  say("points " + std::to_string(sum.total) + " chaotic " + std::to_string(sum.counts[2]) + " failed " +
      std::to_string(sum.failed) + " chaotic-decade run " + std::to_string(sum.chaotic_decade_run()));
  return 0;
}

int cmd_asmap_scan(const io::RunConfig& c) {
  const ASParams p = as_params(c);
  std::vector<ScanPoint> grid;
  for (int n : n_ladder(c))
    for (double a : angles(c.a)) {
      ScanPoint pt;
      pt.n = n;
      pt.a = a;
      pt.omega = p.omega;
      pt.mu = family_mu(p, a, reparametrize(p, n, 0.0).b_n);
      pt.family = "as-model";
      grid.push_back(pt);
    }
  const MapFactory factory = [p](const ScanPoint& pt) { return as_map(p.with_mu(pt.mu)); };
  return run_scan(c, factory, grid);
}

int cmd_scan_lyapunov(const io::RunConfig& c) {
  const ASParams p = as_params(c);
  std::vector<ScanPoint> grid;
  for (double om : c.omega.values())
    for (double mu : c.mu.values(true))
      for (double a : angles(c.a)) {
        ScanPoint pt;
        pt.mu = mu;
        pt.omega = om;
        pt.a = a;
        pt.family = "as-model";
        grid.push_back(pt);
      }
  return run_scan(c, as_factory(p), grid);
}

Family2D configured_family(const io::RunConfig& c) { return as_family(as_params(c), n_ladder(c)); }

GridSpec configured_grid(const io::RunConfig& c) {
  GridSpec g;
  g.threads = c.threads;
  return g;
}

int cmd_singular_limit(const io::RunConfig& c) {
  const Output out = output_for(c);
  const C1Report r = c1_check(configured_family(c), configured_grid(c));
  io::CsvTable t;
  t.header = {"n", "b", "sup_X", "sup_theta", "max_derivative_X", "richardson_change"};
  const auto ns = n_ladder(c);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    double dmax = 0.0;
    for (std::size_t q = 1; q < row.sup.size(); ++q) dmax = std::max(dmax, row.sup[q][0]);
    t.rows.push_back({static_cast<double>(ns[i]), row.b, row.sup[0][0], row.sup[0][1], dmax, row.richardson_change});
  }
  out.csv("singular_limit.csv", std::move(t));
  out.text("singular_limit.json", io::to_json(r, out.fingerprint()));
  say("exponent_X " + io::shortest(r.exponent_X) + " monotone " + (r.monotone ? "yes" : "no"));
  return 0;
}

void verdict(const std::string& what, bool pass) { say(what + (pass ? ": PASS" : ": FAIL")); }

int cmd_verify_misiurewicz(const io::RunConfig& c) {
  const Output out = output_for(c);
  const ASParams p = as_params(c);
  MisiurewiczOptions o;
  o.threads = c.threads;
  const MisiurewiczReport r = verify_misiurewicz(circle_map(p, c.a.lo), c.delta0, c.horizon, o);
  out.text("misiurewicz.json", io::to_json(r, out.fingerprint()));
  say("horizon " + std::to_string(r.horizon) + " lambda0 " + io::shortest(r.lambda0));
  verdict("misiurewicz", r.pass());
  return 0;
}

int cmd_verify_c1(const io::RunConfig& c) {
  const Output out = output_for(c);
  const C1Report r = c1_check(configured_family(c), configured_grid(c));
  out.text("c1.json", io::to_json(r, out.fingerprint()));
  verdict("c1", r.pass());
  return 0;
}

int cmd_verify_c3(const io::RunConfig& c) {
  const Output out = output_for(c);
  const C3Report r = c3_check(configured_family(c), angles(c.a));
  out.text("c3.json", io::to_json(r, out.fingerprint()));
  verdict("c3", r.pass);
  return 0;
}

int cmd_verify_c4(const io::RunConfig& c) {
  const Output out = output_for(c);
  const C4Report r = c4_distortion(configured_family(c), configured_grid(c), c.c4_bound);
  io::CsvTable t;
  t.header = {"b", "ratio", "log_max", "log_min", "worst_a"};
  for (const auto& row : r.rows) t.rows.push_back({row.b, row.ratio, row.log_max, row.log_min, row.worst_a});
  out.csv("c4.csv", std::move(t));
  out.text("c4.json", io::to_json(r, out.fingerprint()));
  verdict("c4", r.pass);
  return 0;
}

struct FlowGrid {
  std::vector<double> Z0;
  std::vector<double> theta;
};

FlowGrid flow_grid(const io::RunConfig& c, const SectionPair& sp) {
  FlowGrid g;
  const double half = sp.K0hat + 1.0;
  for (int i = 0; i < c.grid_Z; ++i)
    g.Z0.push_back(c.grid_Z == 1 ? 0.0 : -half + 2.0 * half * i / (c.grid_Z - 1));
  for (int j = 0; j < c.grid_theta; ++j) g.theta.push_back(kTwoPi * j / c.grid_theta);
  return g;
}

FlowOptions flow_options(const io::RunConfig& c) {
  FlowOptions o;
  o.tol = std::min(o.tol, c.integrator_tol);
  return o;
}

int cmd_verify_flow(const io::RunConfig& c) {
  const Output out = output_for(c);
  const cli::LoopSetup s = cli::loop_setup(c);
  const double mu = c.mu.lo;
  const SectionPair sp = cli::loop_sections(s, mu);
  const FlowGrid g = flow_grid(c, sp);
  const MStageReport r = m_stage_check(s.field.with_mu(mu), sp, s.waves, window_of(s.orbit, s.omega), g.Z0,
                                       g.theta, c.band, flow_options(c), c.threads);
  io::CsvTable t = io::return_samples_table(r.samples);
  t.header.push_back("Z_hat_predicted");
  for (std::size_t i = 0; i < r.samples.size(); ++i) t.rows[i].push_back(r.predictions[i].Z_hat);
  out.csv("flow_check.csv", std::move(t));
  out.text("flow_check.json", io::to_json(r, out.fingerprint()));
  say("max relative error " + io::shortest(r.max_relative_error));
  verdict("flow", r.pass());
  return 0;
}

int cmd_flow_return_map(const io::RunConfig& c) {
  const Output out = output_for(c);
  const cli::LoopSetup s = cli::loop_setup(c);
  const double mu = c.mu.lo;
  const SectionPair sp = cli::loop_sections(s, mu);
  const FlowGrid g = flow_grid(c, sp);
  const auto samples = return_map_grid(s.field.with_mu(mu), sp, g.Z0, g.theta, flow_options(c), c.threads);
  io::CsvTable t = io::return_samples_table(samples);
  t.meta["mu"] = io::shortest(mu);
  t.meta["K0hat"] = io::shortest(sp.K0hat);
  out.csv("return_map.csv", std::move(t));
  std::size_t ok = 0;
  for (const auto& r : samples) ok += r.status == ReturnStatus::Ok;
  say("returned " + std::to_string(ok) + "/" + std::to_string(samples.size()));
  return 0;
}

int cmd_flow_passage_time(const io::RunConfig& c) {
  const Output out = output_for(c);
  const cli::LoopSetup s = cli::loop_setup(c);
  const SectionPair sp = cli::loop_sections(s, c.mu.hi);
  const PassageReport r = passage_time_check(s.field, sp, c.mu.values(true), 0.0, 0.0, flow_options(c));
  io::CsvTable t;
  t.header = {"mu", "t_N", "t_M", "residual"};
  for (std::size_t i = 0; i < r.mu.size(); ++i) t.rows.push_back({r.mu[i], r.t_N[i], r.t_M[i], r.residual[i]});
  out.csv("passage_time.csv", std::move(t));
  out.text("passage_time.json", io::to_json(r, out.fingerprint()));
  say("slope " + io::shortest(r.slope) + " (1/beta = " + io::shortest(1.0 / s.saddle.beta) + ")");
  verdict("passage-time", r.pass());
  return 0;
}

void write_witness(const io::RunConfig* c, const std::string& command, const NumericFailure& e) {
  const std::filesystem::path dir = c ? c->out_dir : "out";
  std::filesystem::create_directories(dir);
  nlohmann::json j = {{"command", command},
                      {"kind", std::string(to_string(e.kind()))},
                      {"message", e.what()},
                      {"witness", e.witness()}};
  if (c) j["config_fingerprint"] = c->fingerprint();
  std::ofstream(dir / "witness.json") << j.dump(2) << '\n';
  std::cerr << "witness written to " << (dir / "witness.json").string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerics for periodically forced homoclinic loops and their return maps"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "INI configuration file");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--threads", flags.threads, "worker threads");
  app.add_option("--tol", flags.tol, "closure tolerance");

  using Command = std::function<int(const io::RunConfig&)>;
  Command chosen;
  std::string chosen_name;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, Command fn) {
    auto* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    const std::string full = parent == &app ? name : parent->get_name() + " " + name;
    sub->callback([&chosen, &chosen_name, fn, full] {
      chosen = fn;
      chosen_name = full;
    });
    return sub;
  };
  auto group = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->require_subcommand(1);
    sub->fallthrough();
    return sub;
  };

  leaf(&app, "homoclinic", "loop orbit CSV and H1 report", cmd_homoclinic);
  leaf(&app, "melnikov", "A, C, S integrals and wave coefficients", cmd_melnikov);
  auto* asmap = group("asmap", "return-map model");
  leaf(asmap, "iterate", "orbit of the model map", cmd_asmap_iterate);
  leaf(asmap, "scan", "classify over a x n", cmd_asmap_scan);
  leaf(asmap, "singular-limit", "convergence table along the n ladder", cmd_singular_limit);
  auto* flow = group("flow", "flow-based return map of the forced field");
  leaf(flow, "return-map", "return map on a (Z0, theta0) grid", cmd_flow_return_map);
  leaf(flow, "passage-time", "inner passage time against ln(1/mu)", cmd_flow_passage_time);
  auto* verify = group("verify", "hypothesis checks");
  leaf(verify, "misiurewicz", "expansion and critical-orbit conditions", cmd_verify_misiurewicz);
  leaf(verify, "c1", "convergence to the singular limit", cmd_verify_c1);
  leaf(verify, "c3", "non-degeneracy in X at critical points", cmd_verify_c3);
  leaf(verify, "c4", "determinant distortion", cmd_verify_c4);
  leaf(verify, "flow", "flow against the analytic outer stage", cmd_verify_flow);
  auto* scan_group = group("scan", "parameter scans");
  leaf(scan_group, "lyapunov", "Lyapunov spectrum and attractor class over mu x omega x a", cmd_scan_lyapunov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationFailure;
  }

  std::optional<io::RunConfig> config;
  try {
    config = resolve(flags);
    return chosen(*config);
  } catch (const NumericFailure& e) {
    std::cerr << chosen_name << ": " << e.what() << '\n';
    write_witness(config ? &*config : nullptr, chosen_name, e);
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << chosen_name << ": invalid input: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << chosen_name << ": " << e.what() << '\n';
    if (config) write_witness(&*config, chosen_name, NumericFailure(FailureKind::InvalidInput, e.what()));
    return kNumericFailure;
  }
}
