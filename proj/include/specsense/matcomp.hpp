#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "specsense/linalg/matrix.hpp"
#include "specsense/linalg/svd.hpp"
#include "specsense/scenario.hpp"

// Nuclear-norm matrix completion: fixed-point iteration (gradient step on
// the data term, then singular-value shrinkage) with tau-continuation.

namespace specsense::matcomp {

using linalg::Matrix;
using scenario::PartialMeasurements;

struct CompletionParams {
  // Final tau of the continuation schedule. A positive value is absolute;
  // <= 0 selects the default tau_final_rel * sigma1(observed entries).
  double tau_final = 0.0;
  double tau_final_rel = 1e-8;
  double step_size = 1.0;  // delta, must lie in (0, 2)
  double mtol = 1e-5;
  std::size_t max_inner_iters = 500;
  double continuation_factor = 0.25;
  double tau_start_scale = 0.25;
  std::optional<std::size_t> rank_estimate;  // truncated SVD rank; absent = full
  double min_tau = std::numeric_limits<double>::min();

  void validate() const;
};

struct CompletionResult {
  Matrix matrix;
  std::vector<double> objective_trace;      // one entry per inner iteration
  std::vector<std::size_t> stage_starts;    // trace index where each tau stage begins
  std::size_t inner_iterations = 0;
  std::vector<double> tau_schedule;
  bool converged = false;
  double masked_rel_residual = 0.0;  // ||P(M - M^E)|| / ||P(M^E)||
};

// Singular-value soft threshold: U diag(max(sigma - alpha, 0)) V'.
Matrix shrink(const Matrix& a, double alpha);

// One gradient step on the data-fidelity term; off-mask entries untouched.
Matrix gradient_step(const Matrix& mk, const PartialMeasurements& pm, double delta);

// ||next - prev||_F / max(1, ||prev||_F) < mtol
bool converged(const Matrix& prev, const Matrix& next, double mtol);

// Rank-r factors of the iterate's SVD; re-exported from linalg.
using linalg::truncated_svd;

// tau * ||m||_* + 1/2 * sum_E (m_ij - observed_ij)^2
double objective(const Matrix& m, const PartialMeasurements& pm, double tau);

CompletionResult complete(const PartialMeasurements& pm, const CompletionParams& params);

}  // namespace specsense::matcomp
