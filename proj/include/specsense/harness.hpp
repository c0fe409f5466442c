#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specsense/jointsparse.hpp"
#include "specsense/matcomp.hpp"
#include "specsense/scenario.hpp"

// Monte Carlo driver: scenario -> sampling -> (noise) -> completion ->
// joint-sparse detection, aggregated into probability-of-detection curves.

namespace specsense::harness {

struct ExperimentConfig {
  scenario::ModelConfig model;
  std::vector<std::size_t> primary_counts;  // PU counts to sweep; empty = {model.n_primary}
  std::vector<double> sampling_rates;
  std::optional<double> snr_db;
  std::size_t trials = 200;
  matcomp::CompletionParams completion;
  jointsparse::JointSparseParams jointsparse;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency

  // Noisy-case derivations (see run_trial): completion tau floor and the
  // column-solver ball radius, both from the known applied noise sigma.
  double noise_tau_multiplier = 1.0;
  double noise_budget_safety = 1.1;

  std::vector<std::size_t> effective_primary_counts() const;
  void validate() const;
};

struct TrialResult {
  std::vector<std::size_t> true_channels;
  std::vector<std::size_t> detected_channels;
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t false_alarms = 0;
  bool completion_converged = false;
  double masked_residual = 0.0;
};

struct PodPoint {
  double sampling_rate = 0.0;
  std::size_t n_primary = 0;
  double pod = 0.0;
  double false_alarm_rate = 0.0;
  std::size_t trials = 0;
};

struct PodCurve {
  std::vector<PodPoint> rows;  // sorted by (n_primary, sampling_rate)
};

// rate * n / p; throws infeasible_rate_error (naming the minimum feasible
// report count) when the implied per-entry probability exceeds 1.
double sampling_rate_to_obs_prob(double rate, std::size_t n, std::size_t p);

// Hit / (Hit + Miss); throws undefined_metric_error when both are zero.
double pod(std::size_t hits, std::size_t misses);

// One full pipeline pass at the given rate. cfg.model.n_primary is the PU
// count for this trial. Completion numerical failures score as all-miss.
TrialResult run_trial(const ExperimentConfig& cfg, double rate,
                      std::size_t trial_index);

PodCurve run_experiment(const ExperimentConfig& cfg);

// CSV with header sampling_rate,n_primary,pod,false_alarm_rate,trials and
// floats printed to 6 significant digits.
std::string to_csv(const PodCurve& curve);

// gnuplot-style blocks: one (rate, pod) table per PU count.
std::string to_plot_data(const PodCurve& curve);

}  // namespace specsense::harness
