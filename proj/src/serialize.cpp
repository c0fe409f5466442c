#include "specsense/serialize.hpp"

#include <limits>
#include <stdexcept>

namespace specsense::io {

namespace {

// Pull a field if present, complaining about unknown keys elsewhere.
template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

void read_optional(const json& j, const char* key, std::optional<double>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<double>();
}

void check_keys(const json& j, std::initializer_list<const char*> known,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok)
      throw std::invalid_argument("unknown config field '" + where + it.key() + "'");
  }
}

std::vector<std::uint8_t> mask_from_json(const json& j, std::size_t rows,
                                         std::size_t cols) {
  std::vector<std::uint8_t> mask;
  mask.reserve(rows * cols);
  if (j.size() != rows) throw std::invalid_argument("mask row count mismatch");
  for (const auto& row : j) {
    if (row.size() != cols) throw std::invalid_argument("mask column count mismatch");
    for (const auto& v : row) mask.push_back(v.get<int>() != 0 ? 1 : 0);
  }
  return mask;
}

json mask_to_json(const std::vector<std::uint8_t>& mask, std::size_t rows,
                  std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < cols; ++c)
      row.push_back(mask[r * cols + c] ? 1 : 0);
    out.push_back(std::move(row));
  }
  return out;
}

json points_to_json(const std::vector<scenario::Point2>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back(json::array({p.x, p.y}));
  return out;
}

std::vector<scenario::Point2> points_from_json(const json& j) {
  std::vector<scenario::Point2> out;
  for (const auto& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

}  // namespace

json matrix_to_json(const linalg::Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

linalg::Matrix matrix_from_json(const json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : 0;
  linalg::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (row.size() != cols) throw std::invalid_argument("ragged matrix in JSON");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

json scenario_to_json(const scenario::Scenario& scn) {
  json occupancy = json::array();
  for (auto b : scn.occupancy) occupancy.push_back(b ? 1 : 0);
  return json{{"n_channels", scn.n_channels},
              {"occupancy", occupancy},
              {"occupied_channels", scn.occupied_channels},
              {"gains", matrix_to_json(scn.gains)},
              {"filters", matrix_to_json(scn.filters)},
              {"fading", matrix_to_json(scn.fading)},
              {"positions_cr", points_to_json(scn.positions_cr)},
              {"positions_pu", points_to_json(scn.positions_pu)}};
}

scenario::Scenario scenario_from_json(const json& j) {
  scenario::Scenario scn;
  scn.n_channels = j.at("n_channels").get<std::size_t>();
  for (const auto& v : j.at("occupancy"))
    scn.occupancy.push_back(v.get<int>() != 0 ? 1 : 0);
  scn.occupied_channels = j.at("occupied_channels").get<std::vector<std::size_t>>();
  scn.gains = matrix_from_json(j.at("gains"));
  scn.filters = matrix_from_json(j.at("filters"));
  scn.fading = matrix_from_json(j.at("fading"));
  scn.positions_cr = points_from_json(j.at("positions_cr"));
  scn.positions_pu = points_from_json(j.at("positions_pu"));
  return scn;
}

json measurements_to_json(const scenario::PartialMeasurements& pm) {
  json out{{"values", matrix_to_json(pm.values)},
           {"mask", mask_to_json(pm.mask, pm.values.rows(), pm.values.cols())},
           {"obs_prob", pm.obs_prob},
           {"snr_db", nullptr},
           {"noise_std", nullptr},
           {"full_reference", nullptr}};
  if (pm.snr_db) out["snr_db"] = *pm.snr_db;
  if (pm.noise_std) out["noise_std"] = *pm.noise_std;
  if (pm.full_reference) out["full_reference"] = matrix_to_json(*pm.full_reference);
  return out;
}

scenario::PartialMeasurements measurements_from_json(const json& j) {
  scenario::PartialMeasurements pm;
  pm.values = matrix_from_json(j.at("values"));
  pm.mask = mask_from_json(j.at("mask"), pm.values.rows(), pm.values.cols());
  pm.obs_prob = j.at("obs_prob").get<double>();
  read_optional(j, "snr_db", pm.snr_db);
  read_optional(j, "noise_std", pm.noise_std);
  if (auto it = j.find("full_reference"); it != j.end() && !it->is_null())
    pm.full_reference = matrix_from_json(*it);
  return pm;
}

json completion_to_json(const matcomp::CompletionResult& result) {
  return json{{"matrix", matrix_to_json(result.matrix)},
              {"objective_trace", result.objective_trace},
              {"stage_starts", result.stage_starts},
              {"tau_schedule", result.tau_schedule},
              {"inner_iterations", result.inner_iterations},
              {"converged", result.converged},
              {"masked_rel_residual", result.masked_rel_residual}};
}

json solution_to_json(const jointsparse::JointSparseSolution& sol) {
  return json{{"x", matrix_to_json(sol.x)},
              {"detected", sol.detected},
              {"weights_final", sol.weights_final},
              {"outer_iterations", sol.outer_iterations},
              {"per_column_residuals", sol.per_column_residuals},
              {"column_errors", sol.column_errors},
              {"detected_per_iteration", sol.detected_per_iteration}};
}

json experiment_to_json(const harness::ExperimentConfig& cfg) {
  json model{{"n_channels", cfg.model.n_channels},
             {"n_crs", cfg.model.n_crs},
             {"n_reports", cfg.model.n_reports},
             {"n_primary", cfg.model.n_primary},
             {"loss_exponent", cfg.model.loss_exponent},
             {"area_side", cfg.model.area_side},
             {"min_distance", cfg.model.min_distance},
             {"seed", cfg.model.seed}};
  json completion{{"tau_final", cfg.completion.tau_final},
                  {"tau_final_rel", cfg.completion.tau_final_rel},
                  {"step_size", cfg.completion.step_size},
                  {"mtol", cfg.completion.mtol},
                  {"max_inner_iters", cfg.completion.max_inner_iters},
                  {"continuation_factor", cfg.completion.continuation_factor},
                  {"tau_start_scale", cfg.completion.tau_start_scale},
                  {"rank_estimate", nullptr},
                  {"min_tau", cfg.completion.min_tau}};
  if (cfg.completion.rank_estimate)
    completion["rank_estimate"] = *cfg.completion.rank_estimate;
  json jointsparse{{"noise_budget", cfg.jointsparse.noise_budget},
                   {"max_outer_iters", cfg.jointsparse.max_outer_iters},
                   {"magnitude_ratio", cfg.jointsparse.magnitude_ratio},
                   {"sparsity_cap", cfg.jointsparse.sparsity_cap},
                   {"support_epsilon", cfg.jointsparse.support_epsilon},
                   {"solver_tolerance", cfg.jointsparse.solver_tolerance}};
  json out{{"model", model},
           {"primary_users", cfg.effective_primary_counts()},
           {"sampling_rates", cfg.sampling_rates},
           {"snr_db", nullptr},
           {"trials", cfg.trials},
           {"seed", cfg.seed},
           {"threads", cfg.threads},
           {"noise_tau_multiplier", cfg.noise_tau_multiplier},
           {"noise_budget_safety", cfg.noise_budget_safety},
           {"completion", completion},
           {"jointsparse", jointsparse}};
  if (cfg.snr_db) out["snr_db"] = *cfg.snr_db;
  return out;
}

harness::ExperimentConfig experiment_from_json(const json& j) {
  harness::ExperimentConfig cfg;
  check_keys(j,
             {"model", "primary_users", "sampling_rates", "snr_db", "trials", "seed",
              "threads", "noise_tau_multiplier", "noise_budget_safety", "completion",
              "jointsparse"},
             "");

  if (auto it = j.find("model"); it != j.end()) {
    const json& m = *it;
    check_keys(m,
               {"n_channels", "n_crs", "n_reports", "n_primary", "loss_exponent",
                "area_side", "min_distance", "seed"},
               "model.");
    read_field(m, "n_channels", cfg.model.n_channels);
    read_field(m, "n_crs", cfg.model.n_crs);
    read_field(m, "n_reports", cfg.model.n_reports);
    read_field(m, "n_primary", cfg.model.n_primary);
    read_field(m, "loss_exponent", cfg.model.loss_exponent);
    read_field(m, "area_side", cfg.model.area_side);
    read_field(m, "min_distance", cfg.model.min_distance);
    read_field(m, "seed", cfg.model.seed);
  }

  read_field(j, "primary_users", cfg.primary_counts);
  read_field(j, "sampling_rates", cfg.sampling_rates);
  read_optional(j, "snr_db", cfg.snr_db);
  read_field(j, "trials", cfg.trials);
  read_field(j, "seed", cfg.seed);
  read_field(j, "threads", cfg.threads);
  read_field(j, "noise_tau_multiplier", cfg.noise_tau_multiplier);
  read_field(j, "noise_budget_safety", cfg.noise_budget_safety);

  if (auto it = j.find("completion"); it != j.end()) {
    const json& c = *it;
    check_keys(c,
               {"tau_final", "tau_final_rel", "step_size", "mtol", "max_inner_iters",
                "continuation_factor", "tau_start_scale", "rank_estimate", "min_tau"},
               "completion.");
    read_field(c, "tau_final", cfg.completion.tau_final);
    read_field(c, "tau_final_rel", cfg.completion.tau_final_rel);
    read_field(c, "step_size", cfg.completion.step_size);
    read_field(c, "mtol", cfg.completion.mtol);
    read_field(c, "max_inner_iters", cfg.completion.max_inner_iters);
    read_field(c, "continuation_factor", cfg.completion.continuation_factor);
    read_field(c, "tau_start_scale", cfg.completion.tau_start_scale);
    read_field(c, "min_tau", cfg.completion.min_tau);
    if (auto r = c.find("rank_estimate"); r != c.end() && !r->is_null())
      cfg.completion.rank_estimate = r->get<std::size_t>();
  }

  if (auto it = j.find("jointsparse"); it != j.end()) {
    const json& s = *it;
    check_keys(s,
               {"noise_budget", "max_outer_iters", "magnitude_ratio", "sparsity_cap",
                "support_epsilon", "solver_tolerance"},
               "jointsparse.");
    read_field(s, "noise_budget", cfg.jointsparse.noise_budget);
    read_field(s, "max_outer_iters", cfg.jointsparse.max_outer_iters);
    read_field(s, "magnitude_ratio", cfg.jointsparse.magnitude_ratio);
    read_field(s, "sparsity_cap", cfg.jointsparse.sparsity_cap);
    read_field(s, "support_epsilon", cfg.jointsparse.support_epsilon);
    read_field(s, "solver_tolerance", cfg.jointsparse.solver_tolerance);
  }
  return cfg;
}

void apply_override(json& config, const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must look like key.path=value: " +
                                key_equals_value);
  const std::string path = key_equals_value.substr(0, eq);
  const std::string raw = key_equals_value.substr(eq + 1);

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }

  json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (part.empty())
      throw std::invalid_argument("override has an empty path segment: " + path);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace specsense::io
