#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "specsense/linalg/matrix.hpp"

// Joint-sparse recovery of X = R G' from the (completed) measurement matrix
// and the known filter matrix: iteratively reweighted column-wise l1
// minimization with shared weights, plus channel detection on the columns.

namespace specsense::jointsparse {

using linalg::Matrix;

struct JointSparseParams {
  double noise_budget = 0.0;       // sigma in ||F x - y|| <= sigma; 0 = equality
  std::size_t max_outer_iters = 5;
  double magnitude_ratio = 0.5;    // "relatively large" threshold, fraction of column max
  std::size_t sparsity_cap = 10;   // max support size for a column to be trusted
  double support_epsilon = 1e-3;   // relative magnitude below which an entry is zero
  double solver_tolerance = 1e-6;

  void validate() const;
};

struct JointSparseSolution {
  Matrix x;  // n x m, nonnegative
  std::vector<std::size_t> detected;  // sorted channel indices
  std::vector<double> weights_final;  // length n, 0 exactly on detected channels
  std::size_t outer_iterations = 0;
  std::vector<double> per_column_residuals;  // ||F x_j - m_j||_2
  std::vector<std::string> column_errors;    // per column; empty string = solved
  std::vector<std::vector<std::size_t>> detected_per_iteration;
};

// min sum_i w_i x_i  s.t.  ||F x - y||_2 <= max(noise_budget, tol*||y||_2), x >= 0.
// Throws infeasible_error (with the best residual achieved) when no
// nonnegative x satisfies the constraint.
std::vector<double> solve_weighted_l1(const Matrix& f, const std::vector<double>& y,
                                      const std::vector<double>& w,
                                      double noise_budget, double tol);

// Channels holding a relatively large entry of some sparse-enough column.
std::vector<std::size_t> detect_from_columns(const Matrix& x,
                                             const JointSparseParams& params);

JointSparseSolution reconstruct(const Matrix& f, const Matrix& m,
                                const JointSparseParams& params);

}  // namespace specsense::jointsparse
