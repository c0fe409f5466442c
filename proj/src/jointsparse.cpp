#include "specsense/jointsparse.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "specsense/errors.hpp"
#include "specsense/kernels/kernels.hpp"
#include "jointsparse/solvers.hpp"

namespace specsense::jointsparse {

namespace {

std::vector<double> solve_column(const detail::ColumnSolverContext& ctx,
                                 const std::vector<double>& y,
                                 const std::vector<double>& w, double noise_budget,
                                 double tol, const std::vector<double>* warm,
                                 double* residual_out) {
  const double ynorm = std::sqrt(kernels::nrm2_sq(y.data(), y.size()));
  const double radius = std::max(noise_budget, tol * ynorm);

  if (ynorm == 0.0) {
    if (residual_out) *residual_out = 0.0;
    return std::vector<double>(ctx.cols, 0.0);
  }

  if (noise_budget <= tol * ynorm) {
    detail::LpOutcome lp = detail::simplex_equality(ctx, y, w, tol);
    if (!lp.feasible)
      throw infeasible_error("weighted l1 program infeasible", lp.residual);
    if (residual_out) *residual_out = lp.residual;
    return std::move(lp.x);
  }

  detail::BallOutcome ball = detail::l2ball_weighted_l1(ctx, y, w, radius, tol, warm);
  if (!ball.feasible)
    throw infeasible_error("weighted l1 program infeasible", ball.best_residual);
  if (residual_out) *residual_out = ball.residual;
  return std::move(ball.x);
}

}  // namespace

void JointSparseParams::validate() const {
  if (noise_budget < 0.0)
    throw std::invalid_argument("jointsparse.noise_budget must be >= 0");
  if (max_outer_iters < 1)
    throw std::invalid_argument("jointsparse.max_outer_iters must be >= 1");
  if (!(magnitude_ratio > 0.0 && magnitude_ratio <= 1.0))
    throw std::invalid_argument("jointsparse.magnitude_ratio must be in (0, 1]");
  if (sparsity_cap < 1)
    throw std::invalid_argument("jointsparse.sparsity_cap must be >= 1");
  if (support_epsilon < 0.0)
    throw std::invalid_argument("jointsparse.support_epsilon must be >= 0");
  if (!(solver_tolerance > 0.0))
    throw std::invalid_argument("jointsparse.solver_tolerance must be positive");
}

std::vector<double> solve_weighted_l1(const Matrix& f, const std::vector<double>& y,
                                      const std::vector<double>& w,
                                      double noise_budget, double tol) {
  if (y.size() != f.rows() || w.size() != f.cols())
    throw std::invalid_argument("solve_weighted_l1: shape mismatch");
  for (double wi : w)
    if (wi < 0.0) throw std::invalid_argument("solve_weighted_l1: weights must be >= 0");
  if (noise_budget < 0.0)
    throw std::invalid_argument("solve_weighted_l1: noise_budget must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_weighted_l1: tol must be positive");

  const detail::ColumnSolverContext ctx = detail::make_context(f);
  std::vector<double> x = solve_column(ctx, y, w, noise_budget, tol, nullptr, nullptr);
  // Negative solver slack must not create phantom support.
  for (double& v : x) v = std::max(v, 0.0);
  return x;
}

std::vector<std::size_t> detect_from_columns(const Matrix& x,
                                             const JointSparseParams& params) {
  params.validate();
  std::set<std::size_t> hits;
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  for (std::size_t j = 0; j < m; ++j) {
    double col_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) col_max = std::max(col_max, x(i, j));
    if (col_max <= 0.0) continue;

    std::size_t support = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (x(i, j) > params.support_epsilon * col_max) ++support;
    if (support > params.sparsity_cap) continue;

    const double bar = params.magnitude_ratio * col_max;
    for (std::size_t i = 0; i < n; ++i)
      if (x(i, j) >= bar) hits.insert(i);
  }
  return {hits.begin(), hits.end()};
}

JointSparseSolution reconstruct(const Matrix& f, const Matrix& m,
                                const JointSparseParams& params) {
  params.validate();
  if (m.rows() != f.rows())
    throw std::invalid_argument("reconstruct: filter and measurement rows disagree");

  const std::size_t n = f.cols();
  const std::size_t cols = m.cols();
  const detail::ColumnSolverContext ctx = detail::make_context(f);

  JointSparseSolution sol;
  sol.x = Matrix(n, cols);
  sol.weights_final.assign(n, 1.0);
  sol.per_column_residuals.assign(cols, 0.0);
  sol.column_errors.assign(cols, std::string());

  std::set<std::size_t> detected;
  std::vector<double> y(f.rows());
  std::vector<std::vector<double>> warm(cols);

  for (std::size_t iter = 0; iter < params.max_outer_iters; ++iter) {
    ++sol.outer_iterations;
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = 0; i < f.rows(); ++i) y[i] = m(i, j);
      try {
        std::vector<double> xj = solve_column(
            ctx, y, sol.weights_final, params.noise_budget, params.solver_tolerance,
            warm[j].empty() ? nullptr : &warm[j], &sol.per_column_residuals[j]);
        for (double& v : xj) v = std::max(v, 0.0);
        warm[j] = xj;
        for (std::size_t i = 0; i < n; ++i) sol.x(i, j) = xj[i];
        sol.column_errors[j].clear();
      } catch (const infeasible_error& e) {
        // Column excluded from detection this iteration, not a global abort.
        sol.column_errors[j] = e.what();
        for (std::size_t i = 0; i < n; ++i) sol.x(i, j) = 0.0;
        sol.per_column_residuals[j] = e.best_residual();
      }
    }

    const std::vector<std::size_t> found = detect_from_columns(sol.x, params);
    std::vector<std::size_t> fresh;
    for (std::size_t ch : found)
      if (detected.insert(ch).second) fresh.push_back(ch);
    sol.detected_per_iteration.push_back(fresh);
    if (fresh.empty()) break;
    for (std::size_t ch : fresh) sol.weights_final[ch] = 0.0;
  }

  sol.detected.assign(detected.begin(), detected.end());
  return sol;
}

}  // namespace specsense::jointsparse
