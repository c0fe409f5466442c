#pragma once

#include <string>

#include <json.hpp>

#include "specsense/harness.hpp"
#include "specsense/jointsparse.hpp"
#include "specsense/linalg/matrix.hpp"
#include "specsense/matcomp.hpp"
#include "specsense/scenario.hpp"

// JSON schemas for fixture capture and cross-implementation comparison.
// Matrices serialize as row-major nested arrays, masks as 0/1.

namespace specsense::io {

using nlohmann::json;

json matrix_to_json(const linalg::Matrix& m);
linalg::Matrix matrix_from_json(const json& j);

json scenario_to_json(const scenario::Scenario& scn);
scenario::Scenario scenario_from_json(const json& j);

json measurements_to_json(const scenario::PartialMeasurements& pm);
scenario::PartialMeasurements measurements_from_json(const json& j);

json completion_to_json(const matcomp::CompletionResult& result);

json solution_to_json(const jointsparse::JointSparseSolution& sol);

json experiment_to_json(const harness::ExperimentConfig& cfg);
harness::ExperimentConfig experiment_from_json(const json& j);

// Dotted-path override, e.g. apply_override(cfg, "completion.mtol=1e-6").
// The value parses as a JSON scalar when possible, else as a string.
void apply_override(json& config, const std::string& key_equals_value);

}  // namespace specsense::io
