// specsense command-line front end: `run` executes a configured POD
// experiment, `demo` walks one verbose trial through the full pipeline.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specsense/errors.hpp"
#include "specsense/harness.hpp"
#include "specsense/rng.hpp"
#include "specsense/serialize.hpp"
#include "specsense/version.hpp"

namespace fs = std::filesystem;
using specsense::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

std::string default_out_dir() {
  if (const char* env = std::getenv("SPECSENSE_OUT_DIR")) return env;
  return "out";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_manifest(const fs::path& out_dir, const std::string& config_path,
                    const json& config, std::optional<double> wall_time) {
  json manifest{{"config_path", config_path},
                {"config", config},
                {"output_dir", out_dir.string()},
                {"tool_version", specsense::kVersion},
                {"wall_time_seconds", nullptr}};
  if (wall_time) manifest["wall_time_seconds"] = *wall_time;
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides) {
  json config = load_config(config_path);
  for (const std::string& kv : overrides) specsense::io::apply_override(config, kv);

  specsense::harness::ExperimentConfig cfg =
      specsense::io::experiment_from_json(config);
  cfg.validate();

  const fs::path out(out_dir);
  fs::create_directories(out);
  write_manifest(out, config_path, config, std::nullopt);

  const auto t0 = std::chrono::steady_clock::now();
  const specsense::harness::PodCurve curve = specsense::harness::run_experiment(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_text(out / "pod_curve.csv", specsense::harness::to_csv(curve));
  write_text(out / "plot.dat", specsense::harness::to_plot_data(curve));
  write_manifest(out, config_path, config, wall);

  std::cout << "wrote " << (out / "pod_curve.csv").string() << " ("
            << curve.rows.size() << " rows, " << wall << " s)\n";
  return kExitOk;
}

json demo_default_config(std::uint64_t seed) {
  json config{{"model", json{{"n_primary", 2}}},
              {"sampling_rates", json::array({0.2})},
              {"trials", 1},
              {"seed", seed}};
  return config;
}

int cmd_demo(std::uint64_t seed, const std::vector<std::string>& overrides,
             const std::string& dump_dir) {
  json config = demo_default_config(seed);
  for (const std::string& kv : overrides) specsense::io::apply_override(config, kv);

  // Demo-only convenience keys: rate, obs_prob.
  double rate_override = -1.0;
  if (auto it = config.find("rate"); it != config.end()) {
    rate_override = it->get<double>();
    config.erase(it);
  }
  double obs_prob_override = -1.0;
  if (auto it = config.find("obs_prob"); it != config.end()) {
    obs_prob_override = it->get<double>();
    config.erase(it);
  }

  specsense::harness::ExperimentConfig cfg =
      specsense::io::experiment_from_json(config);
  if (rate_override > 0.0) cfg.sampling_rates = {rate_override};
  if (obs_prob_override > 0.0) {
    cfg.sampling_rates = {obs_prob_override * static_cast<double>(cfg.model.n_reports) /
                          static_cast<double>(cfg.model.n_channels)};
  }
  cfg.trials = 1;
  cfg.validate();

  const double rate = cfg.sampling_rates.front();
  const std::size_t s = cfg.model.n_primary;
  const double q = specsense::harness::sampling_rate_to_obs_prob(
      rate, cfg.model.n_channels, cfg.model.n_reports);

  // Same derivation as harness trial 0 so demo output matches run_trial.
  const std::uint64_t trial_seed = specsense::rng::derive_seed(
      {cfg.seed, std::bit_cast<std::uint64_t>(rate), static_cast<std::uint64_t>(s), 0});

  specsense::scenario::ModelConfig mcfg = cfg.model;
  mcfg.seed = specsense::rng::derive_seed({trial_seed, 1});
  const auto scn = specsense::scenario::generate_scenario(mcfg);
  const auto measurements = specsense::scenario::build_measurements(scn);
  auto pm = specsense::scenario::sample_entries(
      measurements, q, specsense::rng::derive_seed({trial_seed, 2}));
  if (cfg.snr_db)
    pm = specsense::scenario::add_noise(pm, *cfg.snr_db,
                                        specsense::rng::derive_seed({trial_seed, 3}));

  std::cout << "true channels:";
  for (auto ch : scn.occupied_channels) std::cout << ' ' << ch;
  std::cout << "\nobserved entries |E|: " << pm.observed_count() << " of "
            << pm.values.size() << " (q = " << q << ", rate = " << rate << ")\n";

  auto cparams = cfg.completion;
  auto jparams = cfg.jointsparse;
  if (pm.noise_std) {
    const double p_dim = static_cast<double>(pm.values.rows());
    const double m_dim = static_cast<double>(pm.values.cols());
    if (cparams.tau_final <= 0.0)
      cparams.tau_final = cfg.noise_tau_multiplier * (*pm.noise_std) * std::sqrt(q) *
                          (std::sqrt(p_dim) + std::sqrt(m_dim));
    jparams.noise_budget =
        cfg.noise_budget_safety * std::sqrt(p_dim) * (*pm.noise_std);
    std::cout << "noise: snr_db = " << *cfg.snr_db << ", sigma = " << *pm.noise_std
              << "\n";
  }

  const auto completed = specsense::matcomp::complete(pm, cparams);
  std::cout << "completion: " << completed.inner_iterations << " iterations over "
            << completed.tau_schedule.size() << " tau stages, masked residual "
            << completed.masked_rel_residual
            << (completed.converged ? " (converged)" : " (iteration cap)") << "\n";

  const auto sol = specsense::jointsparse::reconstruct(scn.filters, completed.matrix,
                                                       jparams);
  std::cout << "detected channels:";
  for (auto ch : sol.detected) std::cout << ' ' << ch;
  std::cout << "\n";

  std::size_t hits = 0;
  std::size_t false_alarms = 0;
  for (auto ch : sol.detected) {
    if (scn.occupancy[ch])
      ++hits;
    else
      ++false_alarms;
  }
  std::cout << "hits: " << hits << "  misses: " << (s - hits)
            << "  false alarms: " << false_alarms << "\n";

  if (!dump_dir.empty()) {
    const fs::path dir(dump_dir);
    fs::create_directories(dir);
    write_text(dir / "scenario.json", specsense::io::scenario_to_json(scn).dump(2) + "\n");
    write_text(dir / "measurements.json",
               specsense::io::measurements_to_json(pm).dump(2) + "\n");
    write_text(dir / "completion.json",
               specsense::io::completion_to_json(completed).dump(2) + "\n");
    write_text(dir / "solution.json",
               specsense::io::solution_to_json(sol).dump(2) + "\n");
    std::cout << "fixtures dumped to " << dir.string() << "\n";
  }
  return kExitOk;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const specsense::infeasible_rate_error& e) {
    std::cerr << "error: infeasible configuration: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const specsense::numerical_error& e) {
    std::cerr << "error: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "error: bad config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collaborative spectrum sensing simulator"};
  app.set_version_flag("--version", specsense::kVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a configured POD experiment");
  std::string config_path;
  std::string out_dir = default_out_dir();
  std::vector<std::string> overrides;
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--override", overrides, "dotted key=value config override");

  auto* demo = app.add_subcommand("demo", "run one verbose pipeline trial");
  std::uint64_t seed = 1;
  std::vector<std::string> demo_overrides;
  std::string dump_dir;
  demo->add_option("--seed", seed, "trial seed");
  demo->add_option("--override", demo_overrides, "dotted key=value config override");
  demo->add_option("--dump", dump_dir, "directory for JSON fixtures");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return guarded([&] { return cmd_run(config_path, out_dir, overrides); });
  return guarded([&] { return cmd_demo(seed, demo_overrides, dump_dir); });
}
