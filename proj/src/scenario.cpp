#include "specsense/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "specsense/kernels/kernels.hpp"
#include "specsense/linalg/svd.hpp"
#include "specsense/rng.hpp"

namespace specsense::scenario {

namespace {

// Per-purpose stream tags so the sub-draws of one scenario are independent.
enum StreamTag : std::uint64_t {
  kOccupancy = 1,
  kCrPositions = 2,
  kPuPositions = 3,
  kFading = 4,
  kFilters = 5,
  kSampling = 6,
  kNoise = 7,
};

double distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

void ModelConfig::validate(std::string* warning) const {
  if (n_channels == 0) throw std::invalid_argument("n_channels must be positive");
  if (n_crs == 0) throw std::invalid_argument("n_crs must be positive");
  if (n_reports == 0) throw std::invalid_argument("n_reports must be positive");
  if (n_primary > n_channels)
    throw std::invalid_argument("n_primary cannot exceed n_channels");
  if (!(loss_exponent > 0.0))
    throw std::invalid_argument("loss_exponent must be positive");
  if (!(area_side > 0.0)) throw std::invalid_argument("area_side must be positive");
  if (!(min_distance > 0.0)) throw std::invalid_argument("min_distance must be positive");
  if (warning && n_crs >= n_channels)
    *warning = "n_crs >= n_channels: the model expects m < n";
}

std::size_t PartialMeasurements::observed_count() const {
  std::size_t count = 0;
  for (std::uint8_t b : mask) count += (b != 0);
  return count;
}

double gain(double d, double alpha, double h_mag) {
  if (!(d > 0.0)) throw std::invalid_argument("gain: distance must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("gain: loss exponent must be positive");
  if (h_mag < 0.0) throw std::invalid_argument("gain: fading magnitude must be >= 0");
  return std::pow(d, -alpha / 2.0) * h_mag;
}

Scenario generate_scenario(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_channels;
  const std::size_t m = cfg.n_crs;
  const std::size_t p = cfg.n_reports;
  const std::size_t s = cfg.n_primary;

  Scenario scn;
  scn.n_channels = n;
  scn.occupancy.assign(n, 0);

  {
    rng::Random r(rng::derive_seed({cfg.seed, kOccupancy}));
    scn.occupied_channels = r.sample_without_replacement(n, s);
    for (std::size_t ch : scn.occupied_channels) scn.occupancy[ch] = 1;
  }

  scn.positions_cr.resize(m);
  {
    rng::Random r(rng::derive_seed({cfg.seed, kCrPositions}));
    for (auto& pos : scn.positions_cr) {
      pos.x = r.uniform(0.0, cfg.area_side);
      pos.y = r.uniform(0.0, cfg.area_side);
    }
  }

  scn.positions_pu.resize(s);
  {
    rng::Random r(rng::derive_seed({cfg.seed, kPuPositions}));
    for (auto& pos : scn.positions_pu) {
      pos.x = r.uniform(0.0, cfg.area_side);
      pos.y = r.uniform(0.0, cfg.area_side);
    }
  }

  // Unit mean-square Rayleigh magnitudes: scale = 1/sqrt(2).
  scn.fading = Matrix(m, n);
  {
    rng::Random r(rng::derive_seed({cfg.seed, kFading}));
    const double scale = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) scn.fading(i, j) = r.rayleigh(scale);
  }

  scn.filters = Matrix(p, n);
  {
    rng::Random r(rng::derive_seed({cfg.seed, kFilters}));
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < n; ++j) scn.filters(i, j) = r.normal();
  }

  // Gains exist only where a transmitter exists; other columns stay zero.
  scn.gains = Matrix(m, n);
  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t ch = scn.occupied_channels[k];
    for (std::size_t i = 0; i < m; ++i) {
      const double d =
          std::max(cfg.min_distance, distance(scn.positions_cr[i], scn.positions_pu[k]));
      scn.gains(i, ch) = gain(d, cfg.loss_exponent, scn.fading(i, ch));
    }
  }
  return scn;
}

Matrix build_measurements(const Scenario& scn) {
  const std::size_t n = scn.n_channels;
  const std::size_t m = scn.gains.rows();
  const std::size_t p = scn.filters.rows();
  if (scn.gains.cols() != n || scn.filters.cols() != n || scn.occupancy.size() != n)
    throw std::invalid_argument("build_measurements: inconsistent scenario shapes");

  // M = F diag(occupancy) G' as a sum of rank-one terms over occupied channels.
  Matrix out(p, m);
  std::vector<double> fcol(p);
  std::vector<double> gcol(m);
  for (std::size_t ch : scn.occupied_channels) {
    if (ch >= n) throw std::invalid_argument("build_measurements: channel out of range");
    for (std::size_t i = 0; i < p; ++i) fcol[i] = scn.filters(i, ch);
    for (std::size_t i = 0; i < m; ++i) gcol[i] = scn.gains(i, ch);
    kernels::ger(out.data(), p, m, 1.0, fcol.data(), gcol.data());
  }
  return out;
}

PartialMeasurements sample_entries(const Matrix& m, double obs_prob,
                                   std::uint64_t seed) {
  if (!(obs_prob >= 0.0 && obs_prob <= 1.0))
    throw std::invalid_argument("sample_entries: obs_prob must be in [0, 1]");

  PartialMeasurements pm;
  pm.obs_prob = obs_prob;
  pm.full_reference = m;
  pm.mask.assign(m.size(), 0);
  pm.values = Matrix(m.rows(), m.cols());

  rng::Random r(rng::derive_seed({seed, kSampling}));
  const double* src = m.data();
  double* dst = pm.values.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (r.bernoulli(obs_prob)) {
      pm.mask[i] = 1;
      dst[i] = src[i];
    }
  }
  return pm;
}

PartialMeasurements add_noise(const PartialMeasurements& pm, double snr_db,
                              std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return pm;  // no-noise sentinel

  const std::size_t count = pm.observed_count();
  if (count == 0)
    throw std::invalid_argument("add_noise: no observed entries");
  double signal_power = 0.0;
  const double* v = pm.values.data();
  for (std::size_t i = 0; i < pm.mask.size(); ++i)
    if (pm.mask[i]) signal_power += v[i] * v[i];
  if (signal_power <= 0.0)
    throw std::domain_error("add_noise: observed signal power is zero");

  const double variance =
      (signal_power / static_cast<double>(count)) / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(variance);

  PartialMeasurements out = pm;
  out.snr_db = snr_db;
  out.noise_std = sigma;
  rng::Random r(rng::derive_seed({seed, kNoise}));
  double* dst = out.values.data();
  for (std::size_t i = 0; i < out.mask.size(); ++i)
    if (out.mask[i]) dst[i] += sigma * r.normal();
  return out;
}

CoherenceStats coherence_stats(const Matrix& m, std::size_t s) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("coherence_stats: empty matrix");
  if (s < 1 || s > std::min(m.rows(), m.cols()))
    throw std::invalid_argument("coherence_stats: rank out of range");
  if (kernels::max_abs(m.data(), m.size()) == 0.0)
    throw std::invalid_argument("coherence_stats: zero matrix");

  const linalg::Svd f = linalg::truncated_svd(m, s);
  const double sigma1 = f.sigma.front();

  double row_max = 0.0;
  for (std::size_t i = 0; i < f.U.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < s; ++k) acc += f.U(i, k) * f.U(i, k);
    row_max = std::max(row_max, acc);
  }
  double col_max = 0.0;
  for (std::size_t j = 0; j < f.V.rows(); ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < s; ++k) acc += f.V(j, k) * f.V(j, k);
    col_max = std::max(col_max, acc);
  }

  double cross_max = 0.0;
  for (std::size_t i = 0; i < f.U.rows(); ++i) {
    for (std::size_t j = 0; j < f.V.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s; ++k) acc += f.U(i, k) * f.sigma[k] * f.V(j, k);
      cross_max = std::max(cross_max, std::fabs(acc));
    }
  }

  CoherenceStats stats;
  stats.rank = s;
  stats.mu0 = std::max(row_max, col_max) / static_cast<double>(s);
  stats.mu1 = sigma1 > 0.0
                  ? cross_max / (std::sqrt(static_cast<double>(s)) * sigma1)
                  : 0.0;
  return stats;
}

}  // namespace specsense::scenario
