// l2-ball weighted l1 program via its penalized form
//   min_x>=0  1/2 ||F x - y||^2 + nu w'x
// solved by cyclic coordinate descent, with bisection on nu so the
// residual meets the ball boundary (the KKT condition of the
// constrained program).

#include <algorithm>
#include <cmath>

#include "specsense/kernels/kernels.hpp"
#include "solvers.hpp"

namespace specsense::jointsparse::detail {

namespace {

struct CdState {
  std::vector<double> x;
  std::vector<double> r;  // y - F x
};

// Sweeps until the largest scaled coordinate move drops below tol_abs.
void cd_solve(const ColumnSolverContext& ctx, const std::vector<double>& w, double nu,
              CdState& st, double tol_abs, std::size_t max_sweeps) {
  const std::size_t n = ctx.cols;
  const std::size_t p = ctx.rows;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double csq = ctx.col_sq[i];
      if (csq <= 0.0) continue;
      const double g = kernels::dot(ctx.at.row(i), st.r.data(), p);
      const double target = st.x[i] + (g - nu * w[i]) / csq;
      const double xi = target > 0.0 ? target : 0.0;
      const double delta = xi - st.x[i];
      if (delta != 0.0) {
        kernels::axpy(st.r.data(), -delta, ctx.at.row(i), p);
        st.x[i] = xi;
        max_move = std::max(max_move, std::fabs(delta) * std::sqrt(csq));
      }
    }
    if (max_move < tol_abs) break;
  }
}

double norm2(const std::vector<double>& v) {
  return std::sqrt(kernels::nrm2_sq(v.data(), v.size()));
}

}  // namespace

BallOutcome l2ball_weighted_l1(const ColumnSolverContext& ctx,
                               const std::vector<double>& y,
                               const std::vector<double>& w, double radius,
                               double tol, const std::vector<double>* warm) {
  const std::size_t n = ctx.cols;
  const std::size_t p = ctx.rows;
  BallOutcome out;

  const double ynorm = norm2(y);
  if (ynorm <= radius) {
    // The origin is feasible and w >= 0, so it is optimal.
    out.x.assign(n, 0.0);
    out.residual = ynorm;
    out.best_residual = ynorm;
    out.feasible = true;
    return out;
  }

  const double tol_abs = std::max(tol, 1e-10) * ynorm;
  const std::size_t sweeps = 2000;

  CdState st;
  st.x.assign(n, 0.0);
  st.r = y;
  if (warm && warm->size() == n) {
    st.x = *warm;
    for (std::size_t i = 0; i < n; ++i)
      if (st.x[i] != 0.0) kernels::axpy(st.r.data(), -st.x[i], ctx.at.row(i), p);
  }

  // Initial penalty scale: the largest gradient of the fit term at x = 0
  // over positively weighted coordinates.
  double nu_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] <= 0.0) continue;
    const double g = kernels::dot(ctx.at.row(i), y.data(), p);
    nu_hi = std::max(nu_hi, g / w[i]);
  }
  if (nu_hi <= 0.0) nu_hi = 1.0;

  auto eval = [&](double nu, CdState& state) {
    cd_solve(ctx, w, nu, state, tol_abs, sweeps);
    return norm2(state.r);
  };

  // Feasible side first: a near-zero penalty approaches the nonnegative
  // least-squares residual, the smallest reachable.
  double nu_lo = nu_hi * 1e-12;
  CdState lo = st;
  double res_lo = eval(nu_lo, lo);
  if (res_lo > radius) {
    // Squeeze harder before giving up.
    cd_solve(ctx, w, 0.0, lo, tol_abs * 1e-2, 4 * sweeps);
    res_lo = norm2(lo.r);
    if (res_lo > radius) {
      out.x = lo.x;
      out.residual = res_lo;
      out.best_residual = res_lo;
      out.feasible = false;
      return out;
    }
  }

  CdState hi = lo;
  double res_hi = eval(nu_hi, hi);
  std::size_t grow_guard = 0;
  while (res_hi <= radius && grow_guard++ < 16) {
    nu_lo = nu_hi;
    lo = hi;
    res_lo = res_hi;
    nu_hi *= 8.0;
    res_hi = eval(nu_hi, hi);
  }
  if (res_hi <= radius) {
    // Residual plateaued inside the ball: the constraint is slack and the
    // weighted objective has already collapsed onto the free coordinates.
    out.x = hi.x;
    out.residual = res_hi;
    out.best_residual = res_hi;
    out.feasible = true;
    return out;
  }

  // Bisect on log(nu): keep `lo` feasible, stop when it touches the boundary.
  for (std::size_t iter = 0; iter < 60; ++iter) {
    if (res_lo >= radius * (1.0 - 1e-3)) break;
    if (nu_hi / nu_lo < 1.0 + 1e-9) break;
    const double nu_mid = std::sqrt(nu_lo * nu_hi);
    CdState mid = lo;
    const double res_mid = eval(nu_mid, mid);
    if (res_mid <= radius) {
      nu_lo = nu_mid;
      lo = std::move(mid);
      res_lo = res_mid;
    } else {
      nu_hi = nu_mid;
    }
  }

  out.x = lo.x;
  out.residual = res_lo;
  out.best_residual = res_lo;
  out.feasible = true;
  return out;
}

}  // namespace specsense::jointsparse::detail
