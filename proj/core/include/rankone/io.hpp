#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rankone/as_model.hpp"
#include "rankone/diagnostics.hpp"
#include "rankone/flowmap.hpp"
#include "rankone/homoclinic.hpp"
#include "rankone/melnikov.hpp"
#include "rankone/onedim.hpp"
#include "rankone/rank_one.hpp"

namespace rankone::io {

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fingerprint(const std::string& text);

/// Shortest decimal that parses back to the same double.
std::string shortest(double v);
/// 17 significant digits.
std::string sig17(double v);
double parse_double(const std::string& s);

/// Metadata lines start with '#'; then one header row; LF endings.
struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws when absent
};

void write_csv(std::ostream& os, const CsvTable& t, bool seventeen_digits = false);
CsvTable read_csv(std::istream& is);

/// Columns s, a, b, u, v, E (a, b are the orbit coordinates); frame and window
/// data travel in metadata lines.
void write_orbit_csv(std::ostream& os, const HomoclinicOrbit& orbit,
                     const std::map<std::string, std::string>& extra_meta = {});
HomoclinicOrbit read_orbit_csv(std::istream& is);

/// JSON with every field of the structs; doubles round-trip exactly.
std::string to_json(const MelnikovData& d, const WaveCoefficients* w = nullptr,
                    const std::string& fingerprint = "");
MelnikovData melnikov_from_json(const std::string& text);
std::string to_json(const H1Report& r, const HomoclinicOrbit& orbit, const std::string& fingerprint = "");
std::string to_json(const MisiurewiczReport& r, const std::string& fingerprint = "");
std::string to_json(const C1Report& r, const std::string& fingerprint = "");
std::string to_json(const C3Report& r, const std::string& fingerprint = "");
std::string to_json(const C4Report& r, const std::string& fingerprint = "");
std::string to_json(const MStageReport& r, const std::string& fingerprint = "");
std::string to_json(const PassageReport& r, const std::string& fingerprint = "");
std::string to_json(const ScanSummary& s, const std::string& fingerprint = "");
/// One compact JSON object per line.
std::string to_json_line(const ScanRecord& r);

CsvTable return_samples_table(const std::vector<ReturnSample>& samples);
CsvTable scan_table(const std::vector<ScanRecord>& records);
std::vector<std::string> scan_columns();
std::vector<double> scan_row(const ScanRecord& r);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
  /// count points, linear or logarithmic; count == 1 gives lo.
  std::vector<double> values(bool logarithmic = false) const;
};

/// Batch run configuration, read from an INI-style file with sections.
struct RunConfig {
  std::string system = "glued-loop";  // glued-loop | cubic | linear | polynomial | as-model
  double cubic_nu = 0.0;
  // polynomial field: coefficients of x^i y^j, i + j in [2, 3], order 20 11 02 30 21 12 03
  double alpha = 2.0;
  double beta = 1.0;
  std::vector<double> f_coeffs;
  std::vector<double> g_coeffs;
  std::vector<double> h_coeffs;  // order 00 10 01 20 11 02 30 21 12 03

  double tol = 1e-9;  // closure tolerance
  double integrator_tol = 1e-11;
  double epsilon = 0.05;
  Range mu{1e-6, 1e-6, 1};
  Range omega{5.0, 5.0, 1};
  Range rho{0.0, 0.0, 1};  // 0 selects the middle of the admissible interval
  Range a{0.0, kTwoPi, 8};
  int n_lo = 1;
  int n_hi = 6;

  double h1_d1 = 0.01;
  double h1_d2 = 2.0;
  int h1_depth = 50;

  std::size_t iterations = 10000;
  std::size_t transient = 1000;
  int seeds = 3;
  int horizon = 100;
  double delta0 = 0.0;
  double band = 0.05;
  double c4_bound = 1e3;
  int grid_Z = 4;
  int grid_theta = 8;

  ASParams as;

  std::string orbit_file;
  std::string out_dir = "out";
  std::uint64_t seed = 20240601;
  unsigned threads = 1;

  /// Throws std::invalid_argument: empty ranges, mu_max > 0.1 epsilon^2, bad names.
  void validate() const;
  /// Every field at 17 significant digits; parse_config(canonical()) reproduces it.
  std::string canonical() const;
  /// Hash of canonical() with out_dir and threads reset; they do not change results.
  std::string fingerprint() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Vector field for the configured system (mu = 0).
VectorFieldSpec configured_field(const RunConfig& c);
/// Initial guess for the saddle of the configured system.
Vec2 configured_saddle_guess(const RunConfig& c);

}  // namespace rankone::io
