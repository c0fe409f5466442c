#pragma once

// Column-program solvers backing solve_weighted_l1. Internal to the module.

#include <cstddef>
#include <vector>

#include "specsense/linalg/matrix.hpp"

namespace specsense::jointsparse::detail {

using linalg::Matrix;

// Shared per-F state: the transposed filter matrix (columns contiguous)
// and column norms. Built once, reused across columns and outer iterations.
struct ColumnSolverContext {
  Matrix at;                    // n x p; row i is column i of F
  std::vector<double> col_sq;   // squared column norms of F
  std::size_t rows = 0;         // p
  std::size_t cols = 0;         // n
};

ColumnSolverContext make_context(const Matrix& f);

struct LpOutcome {
  std::vector<double> x;
  double objective = 0.0;
  bool feasible = false;
  double residual = 0.0;  // ||F x - y||_2 at the returned point
  std::size_t iterations = 0;
};

// Two-phase dense simplex for min c'x s.t. F x = y, x >= 0.
// feasible=false when phase 1 cannot reach y; x then holds the
// best-feasibility point and residual its l2 residual.
LpOutcome simplex_equality(const ColumnSolverContext& ctx, const std::vector<double>& y,
                           const std::vector<double>& cost, double feas_tol);

struct BallOutcome {
  std::vector<double> x;
  double residual = 0.0;
  bool feasible = false;
  double best_residual = 0.0;
};

// min w'x s.t. ||F x - y||_2 <= radius, x >= 0, via coordinate descent on
// the penalized form and bisection on the penalty to meet the ball KKT
// condition. Optional warm start.
BallOutcome l2ball_weighted_l1(const ColumnSolverContext& ctx,
                               const std::vector<double>& y,
                               const std::vector<double>& w, double radius,
                               double tol, const std::vector<double>* warm);

}  // namespace specsense::jointsparse::detail
