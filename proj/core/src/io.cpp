#include "rankone/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rankone/fixtures.hpp"

namespace rankone::io {

using nlohmann::json;

std::string fingerprint(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string sig17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  const char* b = s.data();
  while (b < s.data() + s.size() && (*b == ' ' || *b == '\t')) ++b;
  const char* e = s.data() + s.size();
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  if (std::string_view(b, e - b) == "inf") return std::numeric_limits<double>::infinity();
  if (std::string_view(b, e - b) == "-inf") return -std::numeric_limits<double>::infinity();
  if (std::string_view(b, e - b) == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::invalid_argument("missing column " + name);
}

void write_csv(std::ostream& os, const CsvTable& t, bool seventeen) {
  for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << (seventeen ? sig17(row[i]) : shortest(row[i]));
    os << '\n';
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::size_t b = 1;
      while (b < eq && line[b] == ' ') ++b;
      t.meta[line.substr(b, eq - b)] = line.substr(eq + 1);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      t.header = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) throw std::invalid_argument("ragged CSV row");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::invalid_argument("CSV has no header row");
  return t;
}

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(parse_double(tok));
  return out;
}

std::string meta_at(const CsvTable& t, const std::string& key) {
  auto it = t.meta.find(key);
  if (it == t.meta.end()) throw std::invalid_argument("orbit file lacks metadata " + key);
  return it->second;
}

json with_fp(json j, const std::string& fp) {
  if (!fp.empty()) j["config_fingerprint"] = fp;
  return j;
}

}  // namespace

void write_orbit_csv(std::ostream& os, const HomoclinicOrbit& o,
                     const std::map<std::string, std::string>& extra) {
  CsvTable t;
  t.meta = extra;
  t.meta["breaks"] = join(o.breaks);
  t.meta["L_minus"] = sig17(o.L_minus);
  t.meta["L_plus"] = sig17(o.L_plus);
  t.meta["epsilon"] = sig17(o.epsilon);
  t.meta["closure_residual"] = sig17(o.closure_residual);
  t.meta["connected"] = o.connected ? "1" : "0";
  t.meta["saddle"] = sig17(o.saddle.x) + " " + sig17(o.saddle.y);
  t.meta["alpha"] = sig17(o.alpha);
  t.meta["beta"] = sig17(o.beta);
  t.header = {"s", "a", "b", "u", "v", "E"};
  for (std::size_t i = 0; i < o.size(); ++i) {
    const Vec2 tg = i < o.tangent.size() ? o.tangent[i] : Vec2{};
    const double e = i < o.E.size() ? o.E[i] : 0.0;
    t.rows.push_back({o.s[i], o.ell[i].x, o.ell[i].y, tg.x, tg.y, e});
  }
  write_csv(os, t, true);
}

HomoclinicOrbit read_orbit_csv(std::istream& is) {
  const CsvTable t = read_csv(is);
  HomoclinicOrbit o;
  const std::size_t cs = t.column("s"), ca = t.column("a"), cb = t.column("b"), cu = t.column("u"),
                    cv = t.column("v"), ce = t.column("E");
  for (const auto& r : t.rows) {
    o.s.push_back(r[cs]);
    o.ell.push_back({r[ca], r[cb]});
    o.tangent.push_back({r[cu], r[cv]});
    o.E.push_back(r[ce]);
  }
  for (double b : split_doubles(meta_at(t, "breaks"))) o.breaks.push_back(static_cast<std::size_t>(b));
  o.L_minus = parse_double(meta_at(t, "L_minus"));
  o.L_plus = parse_double(meta_at(t, "L_plus"));
  o.epsilon = parse_double(meta_at(t, "epsilon"));
  o.closure_residual = parse_double(meta_at(t, "closure_residual"));
  o.connected = meta_at(t, "connected") == "1";
  const auto sd = split_doubles(meta_at(t, "saddle"));
  if (sd.size() != 2) throw std::invalid_argument("bad saddle metadata");
  o.saddle = {sd[0], sd[1]};
  o.alpha = parse_double(meta_at(t, "alpha"));
  o.beta = parse_double(meta_at(t, "beta"));
  if (o.breaks.size() != 5 || o.breaks.back() + 1 != o.size())
    throw std::invalid_argument("orbit breaks do not match the samples");
  return o;
}

std::string to_json(const MelnikovData& d, const WaveCoefficients* w, const std::string& fp) {
  json j = {{"A", d.A},
            {"C", d.C},
            {"S", d.S},
            {"A_L", d.A_L},
            {"C_L", d.C_L},
            {"S_L", d.S_L},
            {"rho1", d.rho1},
            {"rho2", d.rho2},
            {"omega", d.omega},
            {"L_minus", d.L_minus},
            {"L_plus", d.L_plus},
            {"epsilon", d.epsilon},
            {"tail_estimate", d.tail_estimate},
            {"rate_forward", d.rate_forward},
            {"rate_backward", d.rate_backward},
            {"E_integral_plus", d.E_integral_plus},
            {"E_integral_total", d.E_integral_total},
            {"cs_window_ratio", d.cs_window_ratio},
            {"cs_window_ok", d.cs_window_ok}};
  if (w)
    j["waves"] = {{"c1", w->c1}, {"c2", w->c2}, {"K1", w->K1}, {"P_L", w->P_L}, {"rho", w->rho},
                  {"amplitude", w->amplitude}, {"band_ok", w->band_ok},
                  {"rho_in_interval", w->rho_in_interval}};
  return with_fp(j, fp).dump(2);
}

MelnikovData melnikov_from_json(const std::string& text) {
  const json j = json::parse(text);
  MelnikovData d;
  d.A = j.at("A");
  d.C = j.at("C");
  d.S = j.at("S");
  d.A_L = j.at("A_L");
  d.C_L = j.at("C_L");
  d.S_L = j.at("S_L");
  d.rho1 = j.at("rho1");
  d.rho2 = j.at("rho2");
  d.omega = j.at("omega");
  d.L_minus = j.at("L_minus");
  d.L_plus = j.at("L_plus");
  d.epsilon = j.at("epsilon");
  d.tail_estimate = j.at("tail_estimate");
  d.rate_forward = j.at("rate_forward");
  d.rate_backward = j.at("rate_backward");
  d.E_integral_plus = j.at("E_integral_plus");
  d.E_integral_total = j.at("E_integral_total");
  d.cs_window_ratio = j.at("cs_window_ratio");
  d.cs_window_ok = j.at("cs_window_ok");
  return d;
}

std::string to_json(const H1Report& r, const HomoclinicOrbit& o, const std::string& fp) {
  json j = {{"H1",
             {{"dissipative", r.dissipative},
              {"diophantine_pass", r.diophantine_pass},
              {"search_depth", r.search_depth},
              {"worst_m", r.worst_m},
              {"worst_n", r.worst_n},
              {"worst_value", r.worst_value},
              {"worst_bound", r.worst_bound}}},
            {"orbit",
             {{"samples", o.size()},
              {"connected", o.connected},
              {"closure_residual", o.closure_residual},
              {"L_minus", o.L_minus},
              {"L_plus", o.L_plus},
              {"epsilon", o.epsilon},
              {"saddle", {o.saddle.x, o.saddle.y}},
              {"alpha", o.alpha},
              {"beta", o.beta}}}};
  return with_fp(j, fp).dump(2);
}

std::string to_json(const MisiurewiczReport& r, const std::string& fp) {
  json j = {{"horizon", r.horizon},
            {"delta0", r.delta0},
            {"lambda0", r.lambda0},
            {"M0", r.M0},
            {"c0", r.c0},
            {"cond1a", r.cond1a},
            {"cond1b", r.cond1b},
            {"cond2a", r.cond2a},
            {"cond2b", r.cond2b},
            {"cond2c", r.cond2c},
            {"pass", r.pass()},
            {"lambda0_witness_start", r.lambda0_witness_start},
            {"lambda0_witness_length", r.lambda0_witness_length},
            {"c0_witness_start", r.c0_witness_start},
            {"min_abs_d2f", r.min_abs_d2f},
            {"cond2a_witness", r.cond2a_witness},
            {"cond2b_witness_point", r.cond2b_witness_point},
            {"cond2b_witness_iterate", r.cond2b_witness_iterate},
            {"cond2b_min_distance", r.cond2b_min_distance},
            {"cond2c_checked", r.cond2c_checked},
            {"cond2c_unresolved", r.cond2c_unresolved},
            {"cond2c_witness", r.cond2c_witness},
            {"cond2c_worst_margin", r.cond2c_worst_margin},
            {"critical_points", r.critical_points},
            {"critical_orbits", r.critical_orbits},
            {"critical_landing_period", r.critical_landing_period}};
  return with_fp(j, fp).dump(2);
}

std::string to_json(const C1Report& r, const std::string& fp) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json sup = json::array(), fl = json::array();
    for (std::size_t q = 0; q < row.sup.size(); ++q) {
      sup.push_back({row.sup[q][0], row.sup[q][1]});
      fl.push_back({row.noise_floor[q][0], row.noise_floor[q][1]});
    }
    rows.push_back({{"b", row.b}, {"sup", sup}, {"noise_floor", fl}, {"richardson_change", row.richardson_change}});
  }
  json orders = json::array();
  for (const auto& o : r.orders) orders.push_back({o[0], o[1], o[2]});
  json j = {{"orders", orders},
            {"rows", rows},
            {"exponent_X", r.exponent_X},
            {"exponent_theta", r.exponent_theta},
            {"monotone", r.monotone},
            {"witness", {{"b_large", r.witness_b_large}, {"b_small", r.witness_b_small},
                         {"order", r.witness_order}, {"component", r.witness_component}}}};
  return with_fp(j, fp).dump(2);
}

std::string to_json(const C3Report& r, const std::string& fp) {
  json j = {{"min_abs_derivative", r.min_abs_derivative},
            {"witness_a", r.witness_a},
            {"witness_theta", r.witness_theta},
            {"max_fd_error", r.max_fd_error},
            {"points_checked", r.points_checked},
            {"pass", r.pass}};
  return with_fp(j, fp).dump(2);
}

std::string to_json(const C4Report& r, const std::string& fp) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"b", row.b}, {"ratio", row.ratio}, {"log_max", row.log_max},
                    {"log_min", row.log_min}, {"worst_a", row.worst_a}});
  json j = {{"rows", rows},
            {"bound", r.bound},
            {"max_ratio", r.max_ratio},
            {"ratio_spread", r.ratio_spread},
            {"max_fd_log_error", r.max_fd_log_error},
            {"pass", r.pass}};
  return with_fp(j, fp).dump(2);
}

std::string to_json(const MStageReport& r, const std::string& fp) {
  json j = {{"samples", r.samples.size()},
            {"max_relative_error", r.max_relative_error},
            {"max_phase_error", r.max_phase_error},
            {"band", r.band},
            {"all_in_plus_range", r.all_in_plus_range},
            {"all_returned", r.all_returned},
            {"pass", r.pass()}};
  return with_fp(j, fp).dump(2);
}

std::string to_json(const PassageReport& r, const std::string& fp) {
  json j = {{"mu", r.mu},
            {"t_N", r.t_N},
            {"t_M", r.t_M},
            {"residual", r.residual},
            {"slope", r.slope},
            {"intercept", r.intercept},
            {"max_abs_residual", r.max_abs_residual},
            {"curvature", r.curvature},
            {"K4", r.K4},
            {"K5", r.K5},
            {"max_escape_product", r.max_escape_product},
            {"slope_ok", r.slope_ok},
            {"trend_flag", r.trend_flag},
            {"escape_ok", r.escape_ok},
            {"pass", r.pass()}};
  return with_fp(j, fp).dump(2);
}

std::string to_json(const ScanSummary& s, const std::string& fp) {
  json dec = json::array(), bins = json::array();
  for (const auto& d : s.decades)
    dec.push_back({{"k", d.k}, {"total", d.total}, {"chaotic", d.chaotic}, {"fraction", d.fraction()}});
  for (const auto& d : s.a_bins)
    bins.push_back({{"bin", d.k}, {"total", d.total}, {"chaotic", d.chaotic}, {"fraction", d.fraction()}});
  json j = {{"total", s.total},
            {"failed", s.failed},
            {"periodic_sink", s.counts[0]},
            {"invariant_circle", s.counts[1]},
            {"chaotic", s.counts[2]},
            {"unresolved", s.counts[3]},
            {"decades", dec},
            {"a_bins", bins},
            {"chaotic_decade_run", s.chaotic_decade_run()},
            {"max_identity_error", s.max_identity_error},
            {"note", "indicator only: a finite scan does not certify positive density"}};
  return with_fp(j, fp).dump(2);
}

std::string to_json_line(const ScanRecord& r) {
  json j = {{"index", r.index},
            {"mu", r.point.mu},
            {"a", r.point.a},
            {"omega", r.point.omega},
            {"rho", r.point.rho},
            {"n", r.point.n},
            {"family", r.point.family},
            {"lambda1", r.lambda1},
            {"lambda2", r.lambda2},
            {"class", std::string(to_string(r.cls))},
            {"period", r.period},
            {"rotation_number", r.rotation_number ? json(*r.rotation_number) : json(nullptr)},
            {"birkhoff_mean", r.birkhoff.mean},
            {"birkhoff_variance", r.birkhoff.variance},
            {"iterates_used", r.iterates_used},
            {"transient_dropped", r.transient_dropped},
            {"identity_error", r.identity_error},
            {"error", r.error}};
  return j.dump();
}

CsvTable return_samples_table(const std::vector<ReturnSample>& samples) {
  CsvTable t;
  t.header = {"Z0", "theta0", "Z1", "theta1", "t_M", "t_N", "mu", "Z_hat", "theta_hat", "status"};
  for (const auto& s : samples)
    t.rows.push_back({s.Z0, s.theta0, s.Z1, s.theta1, s.t_M, s.t_N, s.mu, s.Z_hat, s.theta_hat,
                      static_cast<double>(s.status)});
  t.meta["status_codes"] = "0 ok, 1 outside-plus-range, 2 no-return-outer, 3 no-return-inner";
  return t;
}

std::vector<std::string> scan_columns() {
  return {"index", "mu", "a", "omega", "rho", "n", "lambda1", "lambda2", "class", "period",
          "rotation_number", "birkhoff_mean", "birkhoff_variance", "iterates_used",
          "transient_dropped", "identity_error", "failed"};
}

std::vector<double> scan_row(const ScanRecord& r) {
  return {static_cast<double>(r.index), r.point.mu, r.point.a, r.point.omega, r.point.rho,
          static_cast<double>(r.point.n), r.lambda1, r.lambda2, static_cast<double>(r.cls),
          static_cast<double>(r.period),
          r.rotation_number ? *r.rotation_number : std::numeric_limits<double>::quiet_NaN(),
          r.birkhoff.mean, r.birkhoff.variance, static_cast<double>(r.iterates_used),
          static_cast<double>(r.transient_dropped), r.identity_error, r.error.empty() ? 0.0 : 1.0};
}

CsvTable scan_table(const std::vector<ScanRecord>& records) {
  CsvTable t;
  t.header = scan_columns();
  t.meta["class_codes"] = "0 periodic-sink, 1 invariant-circle, 2 chaotic, 3 unresolved";
  for (const auto& r : records) t.rows.push_back(scan_row(r));
  return t;
}

std::vector<double> Range::values(bool logarithmic) const {
  std::vector<double> out;
  if (count <= 1) return {lo};
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    out.push_back(logarithmic ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  return out;
}

// ---- configuration ----

namespace {

namespace pt = boost::property_tree;

std::string range_text(const Range& r) { return sig17(r.lo) + " " + sig17(r.hi) + " " + std::to_string(r.count); }

Range parse_range(const std::string& key, const std::string& s) {
  const auto v = split_doubles(s);
  if (v.size() == 1) return {v[0], v[0], 1};
  if (v.size() != 3) throw std::invalid_argument(key + " needs 'lo hi count'");
  return {v[0], v[1], static_cast<int>(v[2])};
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + sig17(v[i]);
  return out;
}

void check_range(const std::string& name, const Range& r) {
  if (r.count < 1 || !(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw std::invalid_argument("range " + name + " is empty or invalid");
}

}  // namespace

void RunConfig::validate() const {
  static const std::set<std::string> systems{"glued-loop", "cubic", "linear", "polynomial", "as-model"};
  if (!systems.count(system)) throw std::invalid_argument("unknown system '" + system + "'");
  check_range("mu", mu);
  check_range("omega", omega);
  check_range("rho", rho);
  check_range("a", a);
  if (n_lo > n_hi || n_lo < 1) throw std::invalid_argument("range n is empty or invalid");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(tol > 0.0) || !(integrator_tol > 0.0 && integrator_tol <= 1e-3))
    throw std::invalid_argument("tolerances must be positive (integrator tol at most 1e-3)");
  if (!(mu.lo >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  if (system != "as-model" && mu.hi > 0.1 * epsilon * epsilon)
    throw std::invalid_argument("mu_max must not exceed 0.1 epsilon^2 (mu << epsilon)");
  if (seeds < 1 || horizon < 1 || iterations < 1 || grid_Z < 1 || grid_theta < 1)
    throw std::invalid_argument("budgets must be positive");
  if (system == "as-model") as.validate();
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "[system]\nname = " << system << "\ncubic_nu = " << sig17(cubic_nu) << "\nalpha = " << sig17(alpha)
     << "\nbeta = " << sig17(beta) << "\nf = " << list_text(f_coeffs) << "\ng = " << list_text(g_coeffs)
     << "\nh = " << list_text(h_coeffs) << "\n\n";
  os << "[numerics]\ntol = " << sig17(tol) << "\nintegrator_tol = " << sig17(integrator_tol)
     << "\nepsilon = " << sig17(epsilon) << "\n\n";
  os << "[ranges]\nmu = " << range_text(mu) << "\nomega = " << range_text(omega) << "\nrho = " << range_text(rho)
     << "\na = " << range_text(a) << "\nn = " << n_lo << " " << n_hi << "\n\n";
  os << "[h1]\nd1 = " << sig17(h1_d1) << "\nd2 = " << sig17(h1_d2) << "\ndepth = " << h1_depth << "\n\n";
  os << "[scan]\niterations = " << iterations << "\ntransient = " << transient << "\nseeds = " << seeds
     << "\nhorizon = " << horizon << "\ndelta0 = " << sig17(delta0) << "\nband = " << sig17(band)
     << "\nc4_bound = " << sig17(c4_bound) << "\ngrid_Z = " << grid_Z << "\ngrid_theta = " << grid_theta << "\n\n";
  os << "[as]\nalpha = " << sig17(as.alpha) << "\nbeta = " << sig17(as.beta) << "\nepsilon = " << sig17(as.epsilon)
     << "\nlambda = " << sig17(as.lambda) << "\nxi1 = " << sig17(as.xi1) << "\nxi2 = " << sig17(as.xi2)
     << "\nB = " << sig17(as.B) << "\nA = " << sig17(as.A_amp) << "\nomega = " << sig17(as.omega)
     << "\nmu = " << sig17(as.mu) << "\nmu0 = " << sig17(as.mu0) << "\nC1 = " << sig17(as.C1) << "\n\n";
  os << "[output]\norbit_file = " << orbit_file << "\nout_dir = " << out_dir << "\nseed = " << seed
     << "\nthreads = " << threads << "\n";
  return os.str();
}

std::string RunConfig::fingerprint() const {
  RunConfig c = *this;
  c.out_dir = RunConfig{}.out_dir;
  c.threads = RunConfig{}.threads;
  return io::fingerprint(c.canonical());
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig c;
  using Setter = std::function<void(const std::string&)>;
  auto num = [](double& dst) { return Setter([&dst](const std::string& s) { dst = parse_double(s); }); };
  auto integer = [](auto& dst) {
    return Setter([&dst](const std::string& s) {
      const double v = parse_double(s);
      if (v != std::floor(v) || v < 0) throw std::invalid_argument("expected a non-negative integer: " + s);
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    });
  };
  auto text_of = [](std::string& dst) { return Setter([&dst](const std::string& s) { dst = s; }); };
  auto list = [](std::vector<double>& dst) { return Setter([&dst](const std::string& s) { dst = split_doubles(s); }); };
  auto range = [](Range& dst, const std::string& k) {
    return Setter([&dst, k](const std::string& s) { dst = parse_range(k, s); });
  };
  const std::map<std::string, std::map<std::string, Setter>> table{
      {"system",
       {{"name", text_of(c.system)}, {"cubic_nu", num(c.cubic_nu)}, {"alpha", num(c.alpha)},
        {"beta", num(c.beta)}, {"f", list(c.f_coeffs)}, {"g", list(c.g_coeffs)}, {"h", list(c.h_coeffs)}}},
      {"numerics", {{"tol", num(c.tol)}, {"integrator_tol", num(c.integrator_tol)}, {"epsilon", num(c.epsilon)}}},
      {"ranges",
       {{"mu", range(c.mu, "mu")},
        {"omega", range(c.omega, "omega")},
        {"rho", range(c.rho, "rho")},
        {"a", range(c.a, "a")},
        {"n", Setter([&c](const std::string& s) {
           const auto v = split_doubles(s);
           if (v.size() != 2) throw std::invalid_argument("n needs 'lo hi'");
           c.n_lo = static_cast<int>(v[0]);
           c.n_hi = static_cast<int>(v[1]);
         })}}},
      {"h1", {{"d1", num(c.h1_d1)}, {"d2", num(c.h1_d2)}, {"depth", integer(c.h1_depth)}}},
      {"scan",
       {{"iterations", integer(c.iterations)}, {"transient", integer(c.transient)}, {"seeds", integer(c.seeds)},
        {"horizon", integer(c.horizon)}, {"delta0", num(c.delta0)}, {"band", num(c.band)},
        {"c4_bound", num(c.c4_bound)}, {"grid_Z", integer(c.grid_Z)}, {"grid_theta", integer(c.grid_theta)}}},
      {"as",
       {{"alpha", num(c.as.alpha)}, {"beta", num(c.as.beta)}, {"epsilon", num(c.as.epsilon)},
        {"lambda", num(c.as.lambda)}, {"xi1", num(c.as.xi1)}, {"xi2", num(c.as.xi2)}, {"B", num(c.as.B)},
        {"A", num(c.as.A_amp)}, {"omega", num(c.as.omega)}, {"mu", num(c.as.mu)}, {"mu0", num(c.as.mu0)},
        {"C1", num(c.as.C1)}}},
      {"output",
       {{"orbit_file", text_of(c.orbit_file)}, {"out_dir", text_of(c.out_dir)}, {"seed", integer(c.seed)},
        {"threads", integer(c.threads)}}}};

  for (const auto& [section, keys] : tree) {
    auto st = table.find(section);
    if (st == table.end()) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto& [key, node] : keys) {
      auto kt = st->second.find(key);
      if (kt == st->second.end()) throw std::invalid_argument("config: unknown key " + section + "." + key);
      kt->second(node.get_value<std::string>());
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

VectorFieldSpec configured_field(const RunConfig& c) {
  if (c.system == "glued-loop") return fixtures::glued_loop().field;
  if (c.system == "cubic") return fixtures::cubic(c.cubic_nu);
  if (c.system == "linear") return fixtures::linear_saddle(c.alpha, c.beta);
  if (c.system == "polynomial") return fixtures::polynomial(c.alpha, c.beta, c.f_coeffs, c.g_coeffs, c.h_coeffs);
  throw std::invalid_argument("system '" + c.system + "' has no vector field");
}

Vec2 configured_saddle_guess(const RunConfig&) { return {0.0, 0.0}; }

}  // namespace rankone::io
