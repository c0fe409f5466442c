#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "specsense/linalg/matrix.hpp"

// Ground-truth generation: channel occupancy, propagation gains, random
// filter coefficients, and the fusion center's partial (optionally noisy)
// view of the report matrix.

namespace specsense::scenario {

using linalg::Matrix;

struct ModelConfig {
  std::size_t n_channels = 100;  // n
  std::size_t n_crs = 20;        // m
  std::size_t n_reports = 40;    // p, reports per CR
  std::size_t n_primary = 1;     // s, occupied channels
  double loss_exponent = 3.0;    // alpha
  double area_side = 1000.0;     // side of the square deployment region
  double min_distance = 1.0;     // lower clamp on CR-transmitter distance
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on violated invariants. m >= n is legal
  // but unexpected; validate() reports it through the optional warning.
  void validate(std::string* warning = nullptr) const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Scenario {
  std::size_t n_channels = 0;
  std::vector<std::uint8_t> occupancy;        // length n, exactly s ones
  std::vector<std::size_t> occupied_channels; // ascending, size s
  Matrix gains;    // m x n; column j is zero when channel j has no transmitter
  Matrix filters;  // p x n
  Matrix fading;   // m x n, |h|
  std::vector<Point2> positions_cr;  // size m
  std::vector<Point2> positions_pu;  // size s, aligned with occupied_channels
};

struct PartialMeasurements {
  Matrix values;                    // p x m, zero off-mask
  std::vector<std::uint8_t> mask;   // p x m row-major, 0/1
  double obs_prob = 0.0;
  std::optional<double> snr_db;
  std::optional<double> noise_std;           // per-entry noise sigma actually applied
  std::optional<Matrix> full_reference;      // noiseless M, diagnostics only

  std::size_t observed_count() const;
};

struct CoherenceStats {
  double mu0 = 0.0;
  double mu1 = 0.0;
  std::size_t rank = 0;
};

// d^(-alpha/2) * h_mag. Throws std::invalid_argument for d <= 0 or alpha <= 0.
double gain(double d, double alpha, double h_mag);

// Draws one ground-truth instance. Deterministic in cfg.seed.
Scenario generate_scenario(const ModelConfig& cfg);

// F * diag(occupancy) * G' (p x m).
Matrix build_measurements(const Scenario& scn);

// Entrywise Bernoulli(obs_prob) mask; values copied on the mask, zero off it.
PartialMeasurements sample_entries(const Matrix& m, double obs_prob,
                                   std::uint64_t seed);

// Adds N(0, var) to observed entries with var solving
// 10*log10(sum_E M^2 / (|E| * var)) = snr_db. +inf snr is a no-noise sentinel.
PartialMeasurements add_noise(const PartialMeasurements& pm, double snr_db,
                              std::uint64_t seed);

// Diagnostic incoherence witnesses from the rank-s SVD factors.
CoherenceStats coherence_stats(const Matrix& m, std::size_t s);

}  // namespace specsense::scenario
