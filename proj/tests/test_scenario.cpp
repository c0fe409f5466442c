#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oracles.hpp"
#include "specsense/rng.hpp"
#include "specsense/scenario.hpp"

namespace sc = specsense::scenario;
using specsense::linalg::Matrix;

namespace {

sc::ModelConfig small_config(std::uint64_t seed, std::size_t s) {
  sc::ModelConfig cfg;
  cfg.n_channels = 30;
  cfg.n_crs = 8;
  cfg.n_reports = 12;
  cfg.n_primary = s;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("gain evaluates the path-loss fading product") {
  CHECK(sc::gain(1.0, 2.0, 1.0) == doctest::Approx(1.0));
  CHECK(sc::gain(4.0, 2.0, 1.0) == doctest::Approx(0.25));
  // 2^(-1.5) * 0.5, frozen from an independent high-precision evaluation.
  CHECK(sc::gain(2.0, 3.0, 0.5) ==
        doctest::Approx(0.17677669529663687).epsilon(1e-14));
}

TEST_CASE("gain rejects non-positive distance or exponent") {
  CHECK_THROWS_AS(sc::gain(0.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sc::gain(-1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sc::gain(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sc::gain(1.0, -3.0, 1.0), std::invalid_argument);
}

TEST_CASE("gain is monotone decreasing in distance and linear in fading") {
  specsense::rng::Random r(5);
  for (int i = 0; i < 200; ++i) {
    const double d1 = r.uniform(0.5, 900.0);
    const double d2 = d1 + r.uniform(0.1, 100.0);
    const double alpha = r.uniform(2.0, 4.0);
    const double h = r.uniform(0.0, 3.0);
    CHECK(sc::gain(d2, alpha, h) <= sc::gain(d1, alpha, h));
    const double c = r.uniform(0.0, 5.0);
    CHECK(sc::gain(d1, alpha, c * h) ==
          doctest::Approx(c * sc::gain(d1, alpha, h)).epsilon(1e-12));
  }
}

TEST_CASE("empty occupancy produces the zero measurement matrix") {
  const auto scn = sc::generate_scenario(small_config(1, 0));
  for (auto b : scn.occupancy) CHECK(b == 0);
  const Matrix m = sc::build_measurements(scn);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.data()[i] == 0.0);
}

TEST_CASE("single primary user yields a rank-one measurement matrix") {
  sc::ModelConfig cfg;
  cfg.n_channels = 100;
  cfg.n_crs = 20;
  cfg.n_reports = 40;
  cfg.n_primary = 1;
  cfg.seed = 77;
  const auto scn = sc::generate_scenario(cfg);
  std::size_t ones = 0;
  for (auto b : scn.occupancy) ones += b;
  CHECK(ones == 1);
  const auto sigma = oracles::singular_values(sc::build_measurements(scn));
  CHECK(sigma[1] < 1e-8 * sigma[0]);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = sc::generate_scenario(small_config(42, 3));
  const auto b = sc::generate_scenario(small_config(42, 3));
  CHECK(a.occupancy == b.occupancy);
  CHECK(a.gains == b.gains);
  CHECK(a.filters == b.filters);
  CHECK(a.fading == b.fading);
  REQUIRE(a.positions_cr.size() == b.positions_cr.size());
  for (std::size_t i = 0; i < a.positions_cr.size(); ++i) {
    CHECK(a.positions_cr[i].x == b.positions_cr[i].x);
    CHECK(a.positions_cr[i].y == b.positions_cr[i].y);
  }
  const auto c = sc::generate_scenario(small_config(43, 3));
  CHECK(a.filters != c.filters);
}

TEST_CASE("stored gains reproduce the clamped geometry formula") {
  const auto cfg = small_config(9, 4);
  const auto scn = sc::generate_scenario(cfg);
  std::size_t ones = 0;
  for (auto b : scn.occupancy) ones += b;
  CHECK(ones == cfg.n_primary);

  for (std::size_t k = 0; k < scn.occupied_channels.size(); ++k) {
    const std::size_t ch = scn.occupied_channels[k];
    CHECK(scn.occupancy[ch] == 1);
    for (std::size_t i = 0; i < cfg.n_crs; ++i) {
      const double dx = scn.positions_cr[i].x - scn.positions_pu[k].x;
      const double dy = scn.positions_cr[i].y - scn.positions_pu[k].y;
      const double d = std::max(cfg.min_distance, std::sqrt(dx * dx + dy * dy));
      CHECK(scn.gains(i, ch) ==
            doctest::Approx(sc::gain(d, cfg.loss_exponent, scn.fading(i, ch)))
                .epsilon(1e-14));
    }
  }
  for (std::size_t i = 0; i < scn.gains.size(); ++i)
    CHECK(scn.gains.data()[i] >= 0.0);
}

TEST_CASE("oversubscribed primaries are rejected") {
  auto cfg = small_config(1, 31);  // s > n
  CHECK_THROWS_AS(sc::generate_scenario(cfg), std::invalid_argument);
}

TEST_CASE("build_measurements matches a hand matrix product") {
  sc::Scenario scn;
  scn.n_channels = 2;
  scn.occupancy = {1, 0};
  scn.occupied_channels = {0};
  scn.gains = Matrix::from_rows({{0.7, 0.3}});
  scn.filters = Matrix::from_rows({{1.0, 1.0}});
  scn.fading = Matrix(1, 2);
  const Matrix m = sc::build_measurements(scn);
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 1);
  CHECK(m(0, 0) == doctest::Approx(0.7));
}

TEST_CASE("two primaries leave only two significant singular values") {
  auto cfg = small_config(15, 2);
  cfg.n_reports = 10;
  cfg.n_crs = 5;
  const auto scn = sc::generate_scenario(cfg);
  const auto sigma = oracles::singular_values(sc::build_measurements(scn));
  for (std::size_t i = 2; i < sigma.size(); ++i) CHECK(sigma[i] < 1e-10 * sigma[0]);
}

TEST_CASE("measurement rank equals min(s, p, m) across seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto cfg = small_config(seed, 1 + seed % 3);
    const auto scn = sc::generate_scenario(cfg);
    const auto sigma = oracles::singular_values(sc::build_measurements(scn));
    const std::size_t rank = std::min({cfg.n_primary, cfg.n_reports, cfg.n_crs});
    for (std::size_t i = rank; i < sigma.size(); ++i)
      CHECK(sigma[i] < 1e-8 * sigma[0]);
    if (rank > 0) CHECK(sigma[rank - 1] > 1e-8 * sigma[0]);
  }
}

TEST_CASE("full and empty observation masks") {
  const auto scn = sc::generate_scenario(small_config(3, 2));
  const Matrix m = sc::build_measurements(scn);

  const auto full = sc::sample_entries(m, 1.0, 11);
  CHECK(full.observed_count() == m.size());
  CHECK(full.values == m);
  REQUIRE(full.full_reference.has_value());
  CHECK(*full.full_reference == m);

  const auto none = sc::sample_entries(m, 0.0, 11);
  CHECK(none.observed_count() == 0);
  for (std::size_t i = 0; i < none.values.size(); ++i)
    CHECK(none.values.data()[i] == 0.0);
}

TEST_CASE("off-mask entries are exactly zero") {
  const auto scn = sc::generate_scenario(small_config(4, 2));
  const Matrix m = sc::build_measurements(scn);
  const auto pm = sc::sample_entries(m, 0.5, 13);
  for (std::size_t i = 0; i < pm.values.size(); ++i) {
    if (pm.mask[i])
      CHECK(pm.values.data()[i] == m.data()[i]);
    else
      CHECK(pm.values.data()[i] == 0.0);
  }
}

TEST_CASE("sample_entries rejects out-of-range probabilities") {
  const Matrix m(2, 2);
  CHECK_THROWS_AS(sc::sample_entries(m, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(sc::sample_entries(m, 1.1, 1), std::invalid_argument);
}

TEST_CASE("observed-entry counts follow the binomial law") {
  Matrix m(40, 20);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = 1.0;
  const std::size_t seeds = 1000;
  double total = 0.0;
  for (std::size_t seed = 0; seed < seeds; ++seed)
    total += static_cast<double>(sc::sample_entries(m, 0.5, seed).observed_count());
  const double mean = total / static_cast<double>(seeds);
  // mean of Binomial(800, 0.5) across 1000 seeds: 3 sigma = 3*sqrt(200/1000)
  CHECK(std::fabs(mean - 400.0) < 3.0 * std::sqrt(200.0 / 1000.0));
}

TEST_CASE("infinite snr is a no-noise sentinel") {
  const auto scn = sc::generate_scenario(small_config(6, 2));
  const auto pm = sc::sample_entries(sc::build_measurements(scn), 0.6, 17);
  const auto noisy = sc::add_noise(pm, std::numeric_limits<double>::infinity(), 19);
  CHECK(noisy.values == pm.values);
  CHECK(!noisy.noise_std.has_value());
}

TEST_CASE("35 dB noise on unit-power observations has variance 10^-3.5") {
  Matrix m(10, 10);
  for (std::size_t i = 0; i < m.size(); ++i)
    m.data()[i] = (i % 2 == 0) ? 1.0 : -1.0;  // sum_E M^2 == |E|
  const auto pm = sc::sample_entries(m, 1.0, 23);
  const auto noisy = sc::add_noise(pm, 35.0, 29);
  REQUIRE(noisy.noise_std.has_value());
  CHECK(*noisy.noise_std ==
        doctest::Approx(std::sqrt(std::pow(10.0, -3.5))).epsilon(1e-14));
  CHECK(noisy.snr_db == 35.0);
}

TEST_CASE("zero-snr noise power approaches the signal power") {
  Matrix m(10, 8);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = 1.0;
  const auto pm = sc::sample_entries(m, 1.0, 31);
  double noise_power = 0.0;
  const std::size_t seeds = 400;
  for (std::size_t seed = 0; seed < seeds; ++seed) {
    const auto noisy = sc::add_noise(pm, 0.0, seed);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double d = noisy.values.data()[i] - m.data()[i];
      noise_power += d * d;
    }
  }
  noise_power /= static_cast<double>(seeds * m.size());
  CHECK(noise_power == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("noise on an all-zero observation is rejected") {
  Matrix m(3, 3);
  const auto pm = sc::sample_entries(m, 1.0, 37);
  CHECK_THROWS_AS(sc::add_noise(pm, 35.0, 1), std::domain_error);

  const auto empty = sc::sample_entries(m, 0.0, 37);
  CHECK_THROWS_AS(sc::add_noise(empty, 35.0, 1), std::invalid_argument);
}

TEST_CASE("coherence witnesses: spike concentrates, flat basis spreads") {
  Matrix spike(5, 5);
  spike(0, 0) = 1.0;
  const auto s = sc::coherence_stats(spike, 1);
  CHECK(s.mu0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.mu1 == doctest::Approx(1.0).epsilon(1e-12));

  // Flat rank-1: singular vectors are ones/sqrt(n); evaluate the same
  // formula on the independent oracle's factors and compare.
  const std::size_t n = 20;
  Matrix flat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) flat(i, j) = 3.0 / static_cast<double>(n);
  const auto f = sc::coherence_stats(flat, 1);
  CHECK(f.mu0 == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-10));

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(oracles::to_eigen(flat),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  double row_max = 0.0, col_max = 0.0;
  for (Eigen::Index i = 0; i < svd.matrixU().rows(); ++i)
    row_max = std::max(row_max, svd.matrixU()(i, 0) * svd.matrixU()(i, 0));
  for (Eigen::Index j = 0; j < svd.matrixV().rows(); ++j)
    col_max = std::max(col_max, svd.matrixV()(j, 0) * svd.matrixV()(j, 0));
  CHECK(f.mu0 == doctest::Approx(std::max(row_max, col_max)).epsilon(1e-10));
}

TEST_CASE("coherence witnesses are scale invariant") {
  const auto scn = sc::generate_scenario(small_config(8, 2));
  const Matrix m = sc::build_measurements(scn);
  Matrix scaled = m;
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled.data()[i] *= 37.5;
  const auto a = sc::coherence_stats(m, 2);
  const auto b = sc::coherence_stats(scaled, 2);
  CHECK(a.mu0 == doctest::Approx(b.mu0).epsilon(1e-10));
  CHECK(a.mu1 == doctest::Approx(b.mu1).epsilon(1e-10));
}

TEST_CASE("coherence of the zero matrix is rejected") {
  CHECK_THROWS_AS(sc::coherence_stats(Matrix(4, 4), 1), std::invalid_argument);
}

}  // TEST_SUITE
