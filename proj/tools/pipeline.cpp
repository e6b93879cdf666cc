#include "pipeline.hpp"

#include <fstream>
#include <stdexcept>

namespace rankone::cli {

Output::Output(std::filesystem::path dir, std::string fingerprint)
    : dir_(std::move(dir)), fp_(std::move(fingerprint)) {
  std::filesystem::create_directories(dir_);
}

void Output::text(const std::string& name, const std::string& body) const {
  std::ofstream out(path(name), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path(name).string());
  out << body;
  if (!body.empty() && body.back() != '\n') out << '\n';
}

void Output::csv(const std::string& name, io::CsvTable table, bool seventeen) const {
  table.meta["config_fingerprint"] = fp_;
  std::ofstream out(path(name), std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path(name).string());
  io::write_csv(out, table, seventeen);
}

SaddleInfo configured_saddle(const io::RunConfig& c, const VectorFieldSpec& field) {
  return locate_saddle(field, io::configured_saddle_guess(c));
}

HomoclinicOrbit configured_orbit(const io::RunConfig& c, const VectorFieldSpec& field,
                                 const SaddleInfo& saddle) {
  if (!c.orbit_file.empty()) {
    std::ifstream in(c.orbit_file);
    if (!in) throw std::invalid_argument("cannot open orbit file " + c.orbit_file);
    return io::read_orbit_csv(in);
  }
  HomoclinicOptions opts;
  opts.integrator_tol = c.integrator_tol;
  HomoclinicOrbit orbit = compute_homoclinic(field, saddle, c.epsilon, c.tol, opts);
  if (!orbit.connected)
    throw NumericFailure(FailureKind::NoLoop, "no loop: shot does not return to the saddle",
                         {orbit.closure_residual});
  frames_and_E(orbit, field);
  return orbit;
}

double choose_rho(const io::RunConfig& c, const MelnikovData& m) {
  if (c.rho.lo != 0.0) return c.rho.lo;
  const auto [lo, hi] = rho_interval(m);
  return 0.5 * (lo + hi);
}

LoopSetup loop_setup(const io::RunConfig& c) {
  LoopSetup s;
  s.field = io::configured_field(c);
  s.saddle = configured_saddle(c, s.field);
  s.orbit = configured_orbit(c, s.field, s.saddle);
  s.omega = c.omega.lo;
  s.melnikov = compute_ACS(s.orbit, s.field, s.omega);
  s.rho = choose_rho(c, s.melnikov);
  s.waves = wave_coefficients(s.melnikov, s.rho);
  s.field.omega = s.omega;
  s.field.rho = s.rho;
  return s;
}

SectionPair loop_sections(const LoopSetup& s, double mu) {
  const double K0 = estimate_K0hat(s.field, s.saddle.position, mu);
  return build_sections(s.orbit, mu, s.waves, K0);
}

}  // namespace rankone::cli
