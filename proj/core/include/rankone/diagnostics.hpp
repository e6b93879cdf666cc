#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankone/as_model.hpp"

namespace rankone {

/// Planar map on (X, theta). `step` returns theta lifted relative to its input.
struct Map2D {
  std::function<ASState(const ASState&)> step;
  std::function<Mat2(const ASState&)> jacobian;
  std::function<double(const ASState&)> log_abs_det;  // optional closed form
  std::function<bool(const ASState&)> in_domain;      // optional
  double X_lo = 0.0;  // box for random starts
  double X_hi = 1.0;
  std::string name;
};

Map2D as_map(const ASParams& p);

struct LyapunovResult {
  double lambda1 = 0.0;  // lambda1 >= lambda2
  double lambda2 = 0.0;
  double mean_log_det = 0.0;
  double identity_error = 0.0;  // |lambda1 + lambda2 - mean_log_det|
  double rotation_number = 0.0;  // mean lifted theta advance / 2 pi
  int rotation_cf_agree = 0;     // continued-fraction terms shared by the half and full run
  bool escaped = false;
  std::size_t iterates_used = 0;
  std::size_t transient_dropped = 0;
  ASState end;
  std::vector<ASState> tail;  // last iterates, theta reduced
};

struct LyapunovOptions {
  std::size_t tail_keep = 2048;
  bool enforce_budget = true;  // n >= 1e4, transient >= 1e3
};

/// Tangent iteration with QR re-orthonormalization every step.
LyapunovResult lyapunov(const Map2D& map, const ASState& start, std::size_t n,
                        std::size_t transient, const LyapunovOptions& opts = {});

enum class AttractorClass { PeriodicSink, InvariantCircle, Chaotic, Unresolved };

std::string_view to_string(AttractorClass c);

struct ClassifyOptions {
  std::size_t n = 10000;
  std::size_t transient = 1000;
  double chaos_threshold = 0.01;
  double circle_band = 0.005;
  int max_period = 1000;
  double cycle_tol = 1e-9;
  double curve_tol = 0.05;
  int seeds = 3;
  std::uint64_t seed = 20240601;
};

struct Classification {
  AttractorClass cls = AttractorClass::Unresolved;
  LyapunovResult first;
  std::vector<double> seed_lambda1;  // lambda1 of every seed that was run
  int period = 0;
  double curve_residual = 0.0;
  std::vector<ASState> starts;
};

/// Deterministic random starts in [X_lo, X_hi] x [0, 2 pi).
std::vector<ASState> random_starts(const Map2D& map, std::size_t count, std::uint64_t seed);

/// Smallest p <= max_period with the tail repeating after p steps, 0 if none.
int detect_period(const std::vector<ASState>& tail, int max_period, double tol);

/// Roughness of the tail seen as a graph X(theta): 0 for a smooth curve.
double curve_residual(const std::vector<ASState>& tail);

Classification classify_attractor(const Map2D& map, const ClassifyOptions& opts = {});

struct ScanPoint {
  double mu = 0.0;
  double a = 0.0;
  double omega = 0.0;
  double rho = 0.0;
  int n = 0;
  std::string family;
};

struct BirkhoffStats {
  double mean = 0.0;
  double variance = 0.0;
};

struct ScanRecord {
  std::size_t index = 0;
  ScanPoint point;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  AttractorClass cls = AttractorClass::Unresolved;
  int period = 0;
  std::optional<double> rotation_number;
  BirkhoffStats birkhoff;  // observable sin theta along the first orbit
  std::size_t iterates_used = 0;
  std::size_t transient_dropped = 0;
  double identity_error = 0.0;
  std::string error;  // non-empty when the point failed
};

struct DecadeSummary {
  int k = 0;  // mu in [10^-(k+1), 10^-k)
  std::size_t total = 0;
  std::size_t chaotic = 0;
  double fraction() const { return total ? static_cast<double>(chaotic) / total : 0.0; }
};

struct ScanSummary {
  std::size_t total = 0;
  std::size_t failed = 0;
  std::size_t counts[4] = {0, 0, 0, 0};  // by AttractorClass
  std::vector<DecadeSummary> decades;
  std::vector<DecadeSummary> a_bins;  // k = bin index over [0, 2 pi)
  double max_identity_error = 0.0;
  /// Longest run of consecutive decades with at least one chaotic verdict.
  int chaotic_decade_run() const;
};

/// Pure reduction; independent of record order.
ScanSummary summarize(const std::vector<ScanRecord>& records, int a_bins = 8);

using MapFactory = std::function<Map2D(const ScanPoint&)>;
using RecordSink = std::function<void(const ScanRecord&)>;

/// Classifies every grid point; failures are recorded, never thrown. `sink`
/// receives records in grid order as soon as they are available.
std::vector<ScanRecord> scan(const MapFactory& factory, const std::vector<ScanPoint>& grid,
                             const ClassifyOptions& opts = {}, const RecordSink& sink = {},
                             unsigned threads = 1);

/// ASParams varied along a scan grid: mu and omega (when positive) from the point,
/// and a added to xi1.
MapFactory as_factory(const ASParams& base);

struct BirkhoffReport {
  std::vector<double> averages;
  std::vector<std::size_t> checkpoints;
  std::vector<double> spreads;  // max pairwise spread at each checkpoint
  double spread = 0.0;
  double decay_exponent = 0.0;  // fitted d log spread / d log n
  bool converging = false;
  bool bimodal = false;
  bool flagged() const { return !converging || bimodal; }
  std::uint64_t seed = 0;
};

/// Birkhoff averages from `starts` random starts (fixed seed).
BirkhoffReport birkhoff_genericity(const Map2D& map, const std::function<double(const ASState&)>& obs,
                                   std::size_t starts, std::size_t n, std::size_t transient,
                                   std::uint64_t seed = 20240601);

}  // namespace rankone
