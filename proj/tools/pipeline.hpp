#pragma once

#include <filesystem>
#include <string>

#include "rankone/io.hpp"

namespace rankone::cli {

/// Everything the flow commands need: field, loop, integrals, sections.
struct LoopSetup {
  VectorFieldSpec field;  // omega and rho filled in, mu = 0
  SaddleInfo saddle;
  HomoclinicOrbit orbit;
  MelnikovData melnikov;
  WaveCoefficients waves;
  double omega = 0.0;
  double rho = 0.0;
};

/// One output directory; every file written through here carries the
/// configuration fingerprint.
class Output {
 public:
  Output(std::filesystem::path dir, std::string fingerprint);

  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  const std::string& fingerprint() const { return fp_; }

  void text(const std::string& name, const std::string& body) const;
  void csv(const std::string& name, io::CsvTable table, bool seventeen = false) const;

 private:
  std::filesystem::path dir_;
  std::string fp_;
};

SaddleInfo configured_saddle(const io::RunConfig& c, const VectorFieldSpec& field);

/// Orbit from `orbit_file` when set, otherwise computed. Throws NoLoop when the
/// shot does not close.
HomoclinicOrbit configured_orbit(const io::RunConfig& c, const VectorFieldSpec& field,
                                 const SaddleInfo& saddle);

/// rho = 0 in the configuration selects the middle of the admissible interval.
double choose_rho(const io::RunConfig& c, const MelnikovData& m);

LoopSetup loop_setup(const io::RunConfig& c);

SectionPair loop_sections(const LoopSetup& s, double mu);

}  // namespace rankone::cli
