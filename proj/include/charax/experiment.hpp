#pragma once

// Experiments: a configured run with its invariant checks and artifacts,
// eps-sweeps, oracle comparisons and eigenstructure certification.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "charax/config.hpp"
#include "charax/diagnostics.hpp"
#include "charax/temple.hpp"

namespace charax {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

/// Quantities at each scheduled output time that have no CSV column.
struct StopSample {
  double t;
  double max_gradient;  // max |u_x| (max over components / axes)
};

struct RunResult {
  ExperimentConfig config;
  DiagnosticsReport report;
  std::vector<CheckResult> checks;
  std::vector<StopSample> stops;
  double sup_gradient = 0.0;  // sup over steps of max |u_x|
  std::size_t steps = 0;
  double seconds = 0.0;  // wall time of the solve, checks included
  std::vector<std::filesystem::path> artifacts;

  bool pass() const;
};

struct RunOptions {
  bool write = true;  // CSV, JSON and profile CSV under config.out_dir
};

/// Runs the configured experiment, checking its invariants after every step.
/// Writes <run_id>.csv, <run_id>.json and <run_id>_profile.csv. Solver
/// failures propagate as exceptions.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

struct SweepResult {
  std::vector<RunResult> runs;  // ordered as eps_list
  ScalingTable table;
  std::vector<std::filesystem::path> artifacts;

  bool pass() const;  // every run passes and the product ratios lie in [0.5, 2]
};

/// One run per eps in eps_list with dx proportional to eps, up to `jobs`
/// concurrently. Writes <problem>_scaling.csv and <problem>_sweep.json.
SweepResult sweep(const ExperimentConfig& config, unsigned jobs = 1,
                  const RunOptions& options = {});

struct OracleRow {
  double eps;
  std::size_t n;
  double dx;
  double l1_error;
  double linf_error;
};

struct OracleTable {
  std::string problem;
  std::string oracle;  // "riemann", "characteristics" or "constant"
  double t;
  std::vector<OracleRow> rows;
  /// Least-squares slope of log(error) against log(eps); NaN when undefined.
  double l1_rate;
  double linf_rate;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Scalar 1D runs at every eps of eps_list (or eps alone) against the entropy
/// solution of a Riemann datum or the classical solution before breaking.
/// Throws ConfigError when no oracle applies.
OracleTable compare_oracle(const ExperimentConfig& config, unsigned jobs = 1,
                           bool write = true);

/// Least-squares slope of log(y) on log(x); NaN if fewer than two positive
/// pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct CertifyResult {
  CertificationReport report;
  Vec2 probe;
  Mat2 coupling;  // D_ij at the probe (box centre)
};

/// Temple configs only. Writes <problem>_certify.json when `write`.
CertifyResult certify(const ExperimentConfig& config, bool write = true);

}  // namespace charax
