#include <doctest.h>

#include <stdexcept>

#include "specsense/serialize.hpp"

namespace io = specsense::io;
namespace sc = specsense::scenario;
using specsense::linalg::Matrix;

TEST_SUITE("serialize") {

TEST_CASE("matrices round-trip as row-major nested arrays") {
  const Matrix m = Matrix::from_rows({{1.5, -2.0, 0.0}, {3.25, 4.0, -5.5}});
  const io::json j = io::matrix_to_json(m);
  CHECK(j.size() == 2);
  CHECK(j[0][0] == 1.5);
  CHECK(j[1][2] == -5.5);
  CHECK(io::matrix_from_json(j) == m);
}

TEST_CASE("scenarios round-trip bit-exactly") {
  sc::ModelConfig cfg;
  cfg.n_channels = 12;
  cfg.n_crs = 4;
  cfg.n_reports = 6;
  cfg.n_primary = 2;
  cfg.seed = 5;
  const auto scn = sc::generate_scenario(cfg);
  const auto back = io::scenario_from_json(io::scenario_to_json(scn));
  CHECK(back.n_channels == scn.n_channels);
  CHECK(back.occupancy == scn.occupancy);
  CHECK(back.occupied_channels == scn.occupied_channels);
  CHECK(back.gains == scn.gains);
  CHECK(back.filters == scn.filters);
  CHECK(back.fading == scn.fading);
  REQUIRE(back.positions_pu.size() == scn.positions_pu.size());
  for (std::size_t i = 0; i < back.positions_pu.size(); ++i) {
    CHECK(back.positions_pu[i].x == scn.positions_pu[i].x);
    CHECK(back.positions_pu[i].y == scn.positions_pu[i].y);
  }
}

TEST_CASE("partial measurements serialize the 0/1 mask convention") {
  sc::ModelConfig cfg;
  cfg.n_channels = 10;
  cfg.n_crs = 3;
  cfg.n_reports = 5;
  cfg.n_primary = 1;
  cfg.seed = 6;
  const auto pm = sc::sample_entries(
      sc::build_measurements(sc::generate_scenario(cfg)), 0.5, 11);
  const io::json j = io::measurements_to_json(pm);
  for (const auto& row : j.at("mask"))
    for (const auto& v : row) CHECK((v == 0 || v == 1));
  const auto back = io::measurements_from_json(j);
  CHECK(back.values == pm.values);
  CHECK(back.mask == pm.mask);
  CHECK(back.obs_prob == pm.obs_prob);
  REQUIRE(back.full_reference.has_value());
  CHECK(*back.full_reference == *pm.full_reference);
}

TEST_CASE("experiment configs round-trip through JSON") {
  specsense::harness::ExperimentConfig cfg;
  cfg.model.n_channels = 50;
  cfg.model.n_reports = 25;
  cfg.primary_counts = {1, 2};
  cfg.sampling_rates = {0.1, 0.2};
  cfg.snr_db = 35.0;
  cfg.trials = 7;
  cfg.seed = 123;
  cfg.completion.mtol = 2e-5;
  cfg.jointsparse.sparsity_cap = 6;
  const auto back = io::experiment_from_json(io::experiment_to_json(cfg));
  CHECK(back.model.n_channels == 50);
  CHECK(back.model.n_reports == 25);
  CHECK(back.primary_counts == cfg.primary_counts);
  CHECK(back.sampling_rates == cfg.sampling_rates);
  CHECK(back.snr_db == cfg.snr_db);
  CHECK(back.trials == 7);
  CHECK(back.seed == 123);
  CHECK(back.completion.mtol == 2e-5);
  CHECK(back.jointsparse.sparsity_cap == 6);
}

TEST_CASE("unknown config fields are rejected") {
  io::json j{{"trails", 10}};  // typo for trials
  CHECK_THROWS_AS(io::experiment_from_json(j), std::invalid_argument);
  io::json nested{{"completion", io::json{{"mto1", 1e-5}}}};
  CHECK_THROWS_AS(io::experiment_from_json(nested), std::invalid_argument);
}

TEST_CASE("dotted overrides patch nested fields") {
  io::json config{{"trials", 5}};
  io::apply_override(config, "completion.mtol=1e-6");
  io::apply_override(config, "trials=9");
  io::apply_override(config, "snr_db=null");
  io::apply_override(config, "model.seed=77");
  CHECK(config["completion"]["mtol"] == 1e-6);
  CHECK(config["trials"] == 9);
  CHECK(config["snr_db"].is_null());
  CHECK(config["model"]["seed"] == 77);
  CHECK_THROWS_AS(io::apply_override(config, "no_equals_sign"),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::apply_override(config, "=5"), std::invalid_argument);
}

TEST_CASE("completion and solution diagnostics export") {
  sc::ModelConfig mcfg;
  mcfg.n_channels = 12;
  mcfg.n_crs = 4;
  mcfg.n_reports = 6;
  mcfg.n_primary = 1;
  mcfg.seed = 31;
  const auto scn = sc::generate_scenario(mcfg);
  const auto pm =
      sc::sample_entries(sc::build_measurements(scn), 0.8, 33);
  const auto completed = specsense::matcomp::complete(pm, {});
  const io::json cj = io::completion_to_json(completed);
  CHECK(cj.at("objective_trace").size() == completed.objective_trace.size());
  CHECK(cj.at("converged") == completed.converged);

  const auto sol =
      specsense::jointsparse::reconstruct(scn.filters, completed.matrix, {});
  const io::json sj = io::solution_to_json(sol);
  CHECK(sj.at("detected").is_array());
  CHECK(sj.at("weights_final").size() == 12);
}

}  // TEST_SUITE
