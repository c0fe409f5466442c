// Dense two-phase simplex, sized for the column programs of this project
// (tens of rows, a few hundred variables). Bases are refactored every
// iteration; Bland's rule kicks in after a stall to rule out cycling.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "specsense/errors.hpp"
#include "specsense/kernels/kernels.hpp"
#include "specsense/linalg/lu.hpp"
#include "solvers.hpp"

namespace specsense::jointsparse::detail {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

struct Tableau {
  const ColumnSolverContext& ctx;
  const std::vector<double>& b;
  std::vector<double> art_sign;       // artificial column j >= n is sign*e_{j-n}
  std::vector<std::size_t> basis;     // size p
  std::vector<std::uint8_t> in_basis; // size n + p

  std::size_t n() const { return ctx.cols; }
  std::size_t p() const { return ctx.rows; }

  // y' * column(j)
  double price(const std::vector<double>& y, std::size_t j) const {
    if (j < n()) return kernels::dot(y.data(), ctx.at.row(j), p());
    return art_sign[j - n()] * y[j - n()];
  }

  linalg::Matrix basis_matrix() const {
    linalg::Matrix bm(p(), p());
    for (std::size_t k = 0; k < p(); ++k) {
      const std::size_t j = basis[k];
      if (j < n()) {
        const double* col = ctx.at.row(j);
        for (std::size_t i = 0; i < p(); ++i) bm(i, k) = col[i];
      } else {
        bm(j - n(), k) = art_sign[j - n()];
      }
    }
    return bm;
  }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> col(p(), 0.0);
    if (j < n()) {
      const double* src = ctx.at.row(j);
      for (std::size_t i = 0; i < p(); ++i) col[i] = src[i];
    } else {
      col[j - n()] = art_sign[j - n()];
    }
    return col;
  }
};

// Runs simplex iterations for the given cost until optimal. `allow_enter`
// bounds the entering index range (artificials never re-enter).
// Returns false on a numerical dead end.
bool run_phase(Tableau& t, const std::vector<double>& cost, std::size_t allow_enter,
               std::vector<double>& x_basic, std::size_t& iterations) {
  const std::size_t p = t.p();
  const std::size_t max_iters = 60 * (t.n() + p);
  const std::size_t bland_after = 10 * (t.n() + p);
  std::vector<double> c_basic(p);

  for (std::size_t it = 0;; ++it, ++iterations) {
    if (it >= max_iters) return false;
    const bool bland = it >= bland_after;

    linalg::Lu lu(t.basis_matrix());
    if (lu.singular()) return false;
    x_basic = lu.solve(t.b);
    for (double& v : x_basic) v = std::max(v, 0.0);

    for (std::size_t k = 0; k < p; ++k) c_basic[k] = cost[t.basis[k]];
    const std::vector<double> y = lu.solve_transpose(c_basic);

    std::size_t entering = allow_enter;
    double best_rc = -kReducedCostTol;
    for (std::size_t j = 0; j < allow_enter; ++j) {
      if (t.in_basis[j]) continue;
      const double rc = cost[j] - t.price(y, j);
      if (rc < best_rc) {
        best_rc = rc;
        entering = j;
        if (bland) break;  // first improving index
      }
    }
    if (entering == allow_enter) return true;  // optimal

    const std::vector<double> d = lu.solve(t.column(entering));
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::fabs(v));
    const double pivot_tol = kPivotTol * std::max(1.0, dmax);

    std::size_t leaving = p;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p; ++k) {
      if (d[k] <= pivot_tol) continue;
      const double ratio = x_basic[k] / d[k];
      if (ratio < theta - 1e-15 ||
          (ratio < theta + 1e-15 && leaving < p && t.basis[k] < t.basis[leaving])) {
        theta = ratio;
        leaving = k;
      }
    }
    if (leaving == p) {
      // No blocking row. With nonnegative costs the objective cannot be
      // unbounded; treat as a numerically optimal stop.
      return true;
    }

    t.in_basis[t.basis[leaving]] = 0;
    t.basis[leaving] = entering;
    t.in_basis[entering] = 1;
  }
}

double residual_norm(const ColumnSolverContext& ctx, const std::vector<double>& x,
                     const std::vector<double>& y) {
  std::vector<double> fx(ctx.rows, 0.0);
  for (std::size_t i = 0; i < ctx.cols; ++i)
    if (x[i] != 0.0) kernels::axpy(fx.data(), x[i], ctx.at.row(i), ctx.rows);
  return std::sqrt(kernels::diff_nrm2_sq(fx.data(), y.data(), ctx.rows));
}

}  // namespace

ColumnSolverContext make_context(const Matrix& f) {
  ColumnSolverContext ctx;
  ctx.rows = f.rows();
  ctx.cols = f.cols();
  ctx.at = f.transposed();
  ctx.col_sq.resize(ctx.cols);
  for (std::size_t i = 0; i < ctx.cols; ++i)
    ctx.col_sq[i] = kernels::nrm2_sq(ctx.at.row(i), ctx.rows);
  return ctx;
}

LpOutcome simplex_equality(const ColumnSolverContext& ctx, const std::vector<double>& y,
                           const std::vector<double>& cost, double feas_tol) {
  const std::size_t p = ctx.rows;
  const std::size_t n = ctx.cols;
  if (y.size() != p || cost.size() != n)
    throw std::invalid_argument("simplex_equality: shape mismatch");

  Tableau t{ctx, y, std::vector<double>(p), std::vector<std::size_t>(p),
            std::vector<std::uint8_t>(n + p, 0)};
  for (std::size_t i = 0; i < p; ++i) {
    t.art_sign[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    t.basis[i] = n + i;
    t.in_basis[n + i] = 1;
  }

  LpOutcome out;
  std::vector<double> x_basic(p, 0.0);

  // Phase 1: minimize the artificial mass.
  std::vector<double> phase1_cost(n + p, 0.0);
  for (std::size_t i = 0; i < p; ++i) phase1_cost[n + i] = 1.0;
  if (!run_phase(t, phase1_cost, n, x_basic, out.iterations))
    throw numerical_error("simplex phase 1 stalled", out.iterations);

  double artificial_mass = 0.0;
  for (std::size_t k = 0; k < p; ++k)
    if (t.basis[k] >= n) artificial_mass += x_basic[k];

  double b_scale = 0.0;
  for (double v : y) b_scale += std::fabs(v);

  out.x.assign(n, 0.0);
  for (std::size_t k = 0; k < p; ++k)
    if (t.basis[k] < n) out.x[t.basis[k]] = x_basic[k];

  if (artificial_mass > feas_tol * (1.0 + b_scale)) {
    out.feasible = false;
    out.residual = residual_norm(ctx, out.x, y);
    return out;
  }

  // Drive zero-level artificials out of the basis; drop redundant rows by
  // pivoting on any usable original column.
  for (std::size_t k = 0; k < p; ++k) {
    if (t.basis[k] < n) continue;
    linalg::Lu lu(t.basis_matrix());
    if (lu.singular()) throw numerical_error("degenerate basis after phase 1", out.iterations);
    bool pivoted = false;
    for (std::size_t j = 0; j < n && !pivoted; ++j) {
      if (t.in_basis[j]) continue;
      const std::vector<double> d = lu.solve(t.column(j));
      if (std::fabs(d[k]) > 1e-7) {
        t.in_basis[t.basis[k]] = 0;
        t.basis[k] = j;
        t.in_basis[j] = 1;
        pivoted = true;
      }
    }
    if (!pivoted) {
      // Redundant constraint; the artificial stays basic at level zero and
      // phase 2 prices it out with a prohibitive cost.
    }
  }

  // Phase 2 on the true cost; parked artificials keep a prohibitive cost.
  std::vector<double> phase2_cost(n + p, 0.0);
  double cost_scale = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    phase2_cost[j] = cost[j];
    cost_scale = std::max(cost_scale, std::fabs(cost[j]));
  }
  for (std::size_t i = 0; i < p; ++i) phase2_cost[n + i] = 1e9 * cost_scale;
  if (!run_phase(t, phase2_cost, n, x_basic, out.iterations))
    throw numerical_error("simplex phase 2 stalled", out.iterations);

  out.x.assign(n, 0.0);
  for (std::size_t k = 0; k < p; ++k)
    if (t.basis[k] < n) out.x[t.basis[k]] = x_basic[k];
  out.feasible = true;
  out.residual = residual_norm(ctx, out.x, y);
  out.objective = kernels::dot(out.x.data(), cost.data(), n);
  return out;
}

}  // namespace specsense::jointsparse::detail
