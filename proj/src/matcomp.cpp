#include "specsense/matcomp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "specsense/errors.hpp"
#include "specsense/kernels/kernels.hpp"

namespace specsense::matcomp {

namespace {

void check_shapes(const Matrix& mk, const PartialMeasurements& pm) {
  if (!mk.same_shape(pm.values) || pm.mask.size() != pm.values.size())
    throw std::invalid_argument("iterate and observations have different shapes");
}

struct ShrinkOutcome {
  Matrix matrix;
  double nuclear_norm = 0.0;
  Matrix warm;  // square factor to warm-start the next SVD
};

// Shrinkage with optional rank cap and SVD warm start; also reports the
// nuclear norm of the result so the objective needs no second SVD.
ShrinkOutcome shrink_step(const Matrix& y, double alpha,
                          const std::optional<std::size_t>& rank_estimate,
                          const Matrix* warm) {
  linalg::Svd f = linalg::jacobi_svd(y, warm);
  const std::size_t k_keep =
      rank_estimate ? std::min(*rank_estimate, f.sigma.size()) : f.sigma.size();

  ShrinkOutcome out;
  for (std::size_t k = 0; k < k_keep; ++k)
    f.sigma[k] = std::max(f.sigma[k] - alpha, 0.0);
  for (std::size_t k = k_keep; k < f.sigma.size(); ++k) f.sigma[k] = 0.0;
  out.nuclear_norm = std::accumulate(f.sigma.begin(), f.sigma.end(), 0.0);
  out.matrix = linalg::svd_reconstruct(f.U, f.sigma, f.V);
  out.warm = (y.rows() >= y.cols()) ? std::move(f.V) : std::move(f.U);
  return out;
}

}  // namespace

void CompletionParams::validate() const {
  if (!(step_size > 0.0 && step_size < 2.0))
    throw std::invalid_argument("completion.step_size must be in (0, 2)");
  if (!(mtol > 0.0)) throw std::invalid_argument("completion.mtol must be positive");
  if (max_inner_iters == 0)
    throw std::invalid_argument("completion.max_inner_iters must be positive");
  if (!(continuation_factor > 0.0 && continuation_factor < 1.0))
    throw std::invalid_argument("completion.continuation_factor must be in (0, 1)");
  if (!(tau_start_scale > 0.0))
    throw std::invalid_argument("completion.tau_start_scale must be positive");
  if (!(tau_final_rel > 0.0))
    throw std::invalid_argument("completion.tau_final_rel must be positive");
  if (!(min_tau > 0.0)) throw std::invalid_argument("completion.min_tau must be positive");
  if (rank_estimate && *rank_estimate == 0)
    throw std::invalid_argument("completion.rank_estimate must be positive when set");
}

Matrix shrink(const Matrix& a, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("shrink: alpha must be >= 0");
  if (a.empty()) return a;
  linalg::Svd f = linalg::jacobi_svd(a);
  kernels::soft_threshold(f.sigma.data(), alpha, f.sigma.size());
  return linalg::svd_reconstruct(f.U, f.sigma, f.V);
}

Matrix gradient_step(const Matrix& mk, const PartialMeasurements& pm, double delta) {
  check_shapes(mk, pm);
  if (!(delta > 0.0 && delta < 2.0))
    throw std::invalid_argument("gradient_step: delta must be in (0, 2)");
  Matrix y(mk.rows(), mk.cols());
  kernels::masked_grad_step(y.data(), mk.data(), pm.values.data(), pm.mask.data(),
                            delta, mk.size());
  return y;
}

bool converged(const Matrix& prev, const Matrix& next, double mtol) {
  if (!prev.same_shape(next))
    throw std::invalid_argument("converged: shape mismatch");
  const double change = std::sqrt(kernels::diff_nrm2_sq(next.data(), prev.data(), prev.size()));
  const double denom = std::max(1.0, std::sqrt(kernels::nrm2_sq(prev.data(), prev.size())));
  return change / denom < mtol;
}

double objective(const Matrix& m, const PartialMeasurements& pm, double tau) {
  check_shapes(m, pm);
  const linalg::Svd f = linalg::jacobi_svd(m);
  const double nuclear = std::accumulate(f.sigma.begin(), f.sigma.end(), 0.0);
  const double fit =
      kernels::masked_diff_sq(m.data(), pm.values.data(), pm.mask.data(), m.size());
  return tau * nuclear + 0.5 * fit;
}

CompletionResult complete(const PartialMeasurements& pm, const CompletionParams& params) {
  params.validate();
  if (pm.values.empty() || pm.mask.size() != pm.values.size())
    throw std::invalid_argument("complete: malformed observations");
  if (pm.observed_count() == 0)
    throw no_data_error("complete: no observed entries");

  const std::size_t total = pm.values.size();
  const double sigma1 = linalg::spectral_norm(pm.values);

  const double tau_final =
      params.tau_final > 0.0
          ? std::max(params.tau_final, params.min_tau)
          : std::max(params.tau_final_rel * sigma1, params.min_tau);
  double tau = std::max(params.tau_start_scale * sigma1, tau_final);

  CompletionResult result;
  result.matrix = Matrix(pm.values.rows(), pm.values.cols());

  Matrix y(pm.values.rows(), pm.values.cols());
  Matrix warm;
  bool have_warm = false;
  std::size_t iteration = 0;

  for (;;) {
    result.stage_starts.push_back(result.objective_trace.size());
    result.tau_schedule.push_back(tau);
    bool stage_converged = false;

    for (std::size_t it = 0; it < params.max_inner_iters; ++it) {
      kernels::masked_grad_step(y.data(), result.matrix.data(), pm.values.data(),
                                pm.mask.data(), params.step_size, total);
      ShrinkOutcome next = shrink_step(y, tau * params.step_size,
                                       params.rank_estimate,
                                       have_warm ? &warm : nullptr);
      ++iteration;
      const double fit = kernels::masked_diff_sq(next.matrix.data(), pm.values.data(),
                                                 pm.mask.data(), total);
      const double obj = tau * next.nuclear_norm + 0.5 * fit;
      result.objective_trace.push_back(obj);
      if (!std::isfinite(obj))
        throw numerical_error("complete: objective became non-finite", iteration);

      stage_converged = converged(result.matrix, next.matrix, params.mtol);
      result.matrix = std::move(next.matrix);
      warm = std::move(next.warm);
      have_warm = true;
      if (stage_converged) break;
    }

    if (tau <= tau_final) {
      result.converged = stage_converged;
      break;
    }
    tau = std::max(params.continuation_factor * tau, tau_final);
  }

  result.inner_iterations = iteration;
  const double num = kernels::masked_diff_sq(result.matrix.data(), pm.values.data(),
                                             pm.mask.data(), total);
  const double denom =
      kernels::masked_diff_sq(Matrix(pm.values.rows(), pm.values.cols()).data(),
                              pm.values.data(), pm.mask.data(), total);
  result.masked_rel_residual = denom > 0.0 ? std::sqrt(num / denom) : std::sqrt(num);
  return result;
}

}  // namespace specsense::matcomp
