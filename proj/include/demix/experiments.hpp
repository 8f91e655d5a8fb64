#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "demix/matched_filter.hpp"
#include "demix/model_core.hpp"
#include "demix/solvers.hpp"

namespace demix {

// One Monte-Carlo sweep: algorithms x m_grid x trials.
struct ExperimentConfig {
  SignalConfig base;  // m is taken from the grid point, k derived for factored
  std::string link_name = "sigmoid";
  std::vector<std::string> algorithms;  // struct-dht | dht | dst | mf-struct-dht
  std::vector<int> m_grid;              // strictly increasing
  int trials = 10;
  double success_threshold = 0.05;
  std::uint64_t seed = 0;
  SolverParams solver;

  // Design generation.
  std::string design_form = "dense";  // dense | factored
  SubgaussianFamily design_family = SubgaussianFamily::gaussian;
  double design_scale = 0.0;  // <= 0: 1/sqrt(m)
  double design_T = 20.0;
  double b_norm_exponent = 0.5;

  BasisKind phi_kind = BasisKind::identity;
  BasisKind psi_kind = BasisKind::dct;

  // Tone grid for periodic runs.
  double grid_omega_max = 6.0;
  double grid_resolution = 0.0;  // <= 0: pi / (8 T)

  std::string output_dir = ".";
  std::vector<std::string> emit = {"csv", "svg-success", "svg-error"};
  // Off by default so repeated runs produce byte-identical CSVs; when on,
  // wall_time_seconds carries measured values and reruns will differ there.
  bool record_timings = false;
  int threads = 0;  // <= 0: hardware concurrency

  void validate() const;
};

struct TrialResult {
  std::string algorithm;
  int m = 0;
  int trial_index = 0;
  double normalized_error = 0.0;  // NaN marks a failed trial
  bool success = false;
  int iterations = 0;
  double wall_time_seconds = 0.0;
  double error_theta1 = 0.0;  // component diagnostics (JSON only)
  double error_theta2 = 0.0;
  std::string error_message;  // non-empty for failed trials
};

struct AggregateRow {
  std::string algorithm;
  int m = 0;
  double success_probability = 0.0;
  double mean_normalized_error = 0.0;  // over rows with finite error
  int trials = 0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<TrialResult> rows;
  std::vector<AggregateRow> aggregates;
};

// The documented per-trial seed: derive(seed, algorithm, m, trial_index).
// Keyed by the algorithm name, so adding algorithms leaves other trials'
// randomness untouched.
std::uint64_t trial_seed(std::uint64_t seed, const std::string& algorithm, int m,
                         int trial_index);

// Bases depend only on (config.seed, kinds, n) and are shared by every trial.
BasisPair experiment_bases(const ExperimentConfig& config);

TrialResult run_trial(const ExperimentConfig& config, const std::string& algorithm,
                      int m, int trial_index);
TrialResult run_trial(const ExperimentConfig& config, const BasisPair& bases,
                      const std::string& algorithm, int m, int trial_index);

// Runs all combinations on a worker pool. Row order, seeding, and aggregates
// are independent of the thread count; per-trial runtime failures are
// recorded in their row and never abort the sweep.
SweepResult run_sweep(const ExperimentConfig& config);

std::vector<AggregateRow> aggregate_rows(const ExperimentConfig& config,
                                         const std::vector<TrialResult>& rows);

std::string sweep_to_csv(const SweepResult& sweep);
std::vector<TrialResult> rows_from_csv(std::istream& in);
nlohmann::json sweep_to_json(const SweepResult& sweep);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

// Writes the requested artifacts ("csv", "svg-success", "svg-error") into
// output_dir and returns their paths. Plot kinds refuse an empty sweep.
std::vector<std::string> emit_outputs(const SweepResult& sweep,
                                      const std::vector<std::string>& kinds,
                                      const std::string& output_dir);

// Flat sectioned key-value config format; unknown sections or keys are
// configuration errors.
ExperimentConfig parse_experiment_config(std::istream& in,
                                         const std::string& origin);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace demix
