#include "specsense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "specsense/errors.hpp"
#include "specsense/rng.hpp"

namespace specsense::harness {

namespace {

std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Deterministic work distribution: results land in per-index slots, so the
// reduction is independent of the thread schedule.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<std::size_t> ExperimentConfig::effective_primary_counts() const {
  if (!primary_counts.empty()) return primary_counts;
  return {model.n_primary};
}

void ExperimentConfig::validate() const {
  model.validate();
  completion.validate();
  jointsparse.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (sampling_rates.empty())
    throw std::invalid_argument("sampling_rates must not be empty");
  for (double rate : sampling_rates) {
    if (!(rate > 0.0 && rate <= 1.0))
      throw std::invalid_argument("sampling rates must lie in (0, 1]");
    sampling_rate_to_obs_prob(rate, model.n_channels, model.n_reports);
  }
  for (std::size_t s : effective_primary_counts()) {
    if (s == 0)
      throw std::invalid_argument("POD experiments need at least one primary user");
    if (s > model.n_channels)
      throw std::invalid_argument("primary count exceeds channel count");
  }
  if (snr_db && !(std::isfinite(*snr_db) || *snr_db > 0.0))
    throw std::invalid_argument("snr_db must be finite or +inf");
  if (!(noise_tau_multiplier > 0.0))
    throw std::invalid_argument("noise_tau_multiplier must be positive");
  if (!(noise_budget_safety > 0.0))
    throw std::invalid_argument("noise_budget_safety must be positive");
}

double sampling_rate_to_obs_prob(double rate, std::size_t n, std::size_t p) {
  if (!(rate > 0.0 && rate <= 1.0))
    throw std::invalid_argument("sampling rate must lie in (0, 1]");
  if (n == 0 || p == 0) throw std::invalid_argument("n and p must be positive");
  const double q = rate * static_cast<double>(n) / static_cast<double>(p);
  if (q > 1.0 + 1e-12) {
    const auto min_p = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n)));
    throw infeasible_rate_error(
        "sampling rate " + format_g6(rate) + " needs n_reports >= " +
            std::to_string(min_p) + " (got " + std::to_string(p) + ")",
        min_p);
  }
  return std::min(q, 1.0);
}

double pod(std::size_t hits, std::size_t misses) {
  if (hits + misses == 0)
    throw undefined_metric_error("POD undefined: no detection events");
  return static_cast<double>(hits) / static_cast<double>(hits + misses);
}

TrialResult run_trial(const ExperimentConfig& cfg, double rate,
                      std::size_t trial_index) {
  const std::size_t s = cfg.model.n_primary;
  const double q =
      sampling_rate_to_obs_prob(rate, cfg.model.n_channels, cfg.model.n_reports);

  const std::uint64_t trial_seed = rng::derive_seed(
      {cfg.seed, std::bit_cast<std::uint64_t>(rate), static_cast<std::uint64_t>(s),
       static_cast<std::uint64_t>(trial_index)});

  scenario::ModelConfig mcfg = cfg.model;
  mcfg.seed = rng::derive_seed({trial_seed, 1});
  const scenario::Scenario scn = scenario::generate_scenario(mcfg);
  const linalg::Matrix measurements = scenario::build_measurements(scn);

  scenario::PartialMeasurements pm =
      scenario::sample_entries(measurements, q, rng::derive_seed({trial_seed, 2}));
  if (cfg.snr_db)
    pm = scenario::add_noise(pm, *cfg.snr_db, rng::derive_seed({trial_seed, 3}));

  TrialResult out;
  out.true_channels = scn.occupied_channels;

  matcomp::CompletionParams cparams = cfg.completion;
  jointsparse::JointSparseParams jparams = cfg.jointsparse;
  if (pm.noise_std) {
    const double p_dim = static_cast<double>(pm.values.rows());
    const double m_dim = static_cast<double>(pm.values.cols());
    // Shrinkage floor at the operator-norm scale of the masked noise.
    const double noise_tau = cfg.noise_tau_multiplier * (*pm.noise_std) *
                             std::sqrt(q) * (std::sqrt(p_dim) + std::sqrt(m_dim));
    if (cparams.tau_final <= 0.0) cparams.tau_final = noise_tau;
    jparams.noise_budget =
        cfg.noise_budget_safety * std::sqrt(p_dim) * (*pm.noise_std);
  }

  matcomp::CompletionResult completed;
  try {
    completed = matcomp::complete(pm, cparams);
  } catch (const numerical_error&) {
    out.hits = 0;
    out.misses = s;
    out.false_alarms = 0;
    out.completion_converged = false;
    out.masked_residual = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.completion_converged = completed.converged;
  out.masked_residual = completed.masked_rel_residual;

  const jointsparse::JointSparseSolution sol =
      jointsparse::reconstruct(scn.filters, completed.matrix, jparams);
  out.detected_channels = sol.detected;

  const std::set<std::size_t> truth(out.true_channels.begin(), out.true_channels.end());
  for (std::size_t ch : sol.detected) {
    if (truth.count(ch))
      ++out.hits;
    else
      ++out.false_alarms;
  }
  out.misses = s - out.hits;
  return out;
}

PodCurve run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  std::vector<std::size_t> counts = cfg.effective_primary_counts();
  std::sort(counts.begin(), counts.end());
  std::vector<double> rates = cfg.sampling_rates;
  std::sort(rates.begin(), rates.end());

  PodCurve curve;
  for (std::size_t s : counts) {
    ExperimentConfig point_cfg = cfg;
    point_cfg.model.n_primary = s;
    for (double rate : rates) {
      std::vector<TrialResult> results(cfg.trials);
      parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
        results[trial] = run_trial(point_cfg, rate, trial);
      });

      std::size_t hits = 0;
      std::size_t misses = 0;
      std::size_t false_alarms = 0;
      for (const TrialResult& r : results) {
        hits += r.hits;
        misses += r.misses;
        false_alarms += r.false_alarms;
      }

      PodPoint point;
      point.sampling_rate = rate;
      point.n_primary = s;
      point.trials = cfg.trials;
      point.pod = pod(hits, misses);
      const double unoccupied =
          static_cast<double>(cfg.trials) *
          static_cast<double>(cfg.model.n_channels - s);
      point.false_alarm_rate =
          unoccupied > 0.0 ? static_cast<double>(false_alarms) / unoccupied : 0.0;
      curve.rows.push_back(point);
    }
  }
  return curve;
}

std::string to_csv(const PodCurve& curve) {
  std::string out = "sampling_rate,n_primary,pod,false_alarm_rate,trials\n";
  for (const PodPoint& r : curve.rows) {
    out += format_g6(r.sampling_rate);
    out += ',';
    out += std::to_string(r.n_primary);
    out += ',';
    out += format_g6(r.pod);
    out += ',';
    out += format_g6(r.false_alarm_rate);
    out += ',';
    out += std::to_string(r.trials);
    out += '\n';
  }
  return out;
}

std::string to_plot_data(const PodCurve& curve) {
  std::string out;
  std::size_t current = SIZE_MAX;
  bool first_block = true;
  for (const PodPoint& r : curve.rows) {
    if (r.n_primary != current) {
      if (!first_block) out += "\n\n";
      first_block = false;
      current = r.n_primary;
      out += "# n_primary = " + std::to_string(current) + "\n";
    }
    out += format_g6(r.sampling_rate) + " " + format_g6(r.pod) + "\n";
  }
  return out;
}

}  // namespace specsense::harness
