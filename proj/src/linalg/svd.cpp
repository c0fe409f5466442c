// One-sided Jacobi SVD. Works on contiguous column buffers so the pair
// rotations and Gram products run through the SIMD kernels.

#include "specsense/linalg/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "specsense/kernels/kernels.hpp"

namespace specsense::linalg {

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOrthTol = 1e-15;  // relative column-orthogonality target

// Column-major working set: col(k) = data + k*len, k < count.
struct ColumnSet {
  std::vector<double> data;
  std::size_t len = 0;
  std::size_t count = 0;

  ColumnSet(std::size_t len_, std::size_t count_)
      : data(len_ * count_, 0.0), len(len_), count(count_) {}

  double* col(std::size_t k) { return data.data() + k * len; }
  const double* col(std::size_t k) const { return data.data() + k * len; }
};

// Orthonormal completion: replace column `k` of `u` with a unit vector
// orthogonal to all other columns. Deterministic (picks the coordinate
// direction with the largest residual).
void complete_column(ColumnSet& u, std::size_t k) {
  const std::size_t len = u.len;
  std::vector<double> best(len, 0.0);
  double best_norm_sq = -1.0;
  std::vector<double> cand(len);
  for (std::size_t e = 0; e < len; ++e) {
    std::fill(cand.begin(), cand.end(), 0.0);
    cand[e] = 1.0;
    for (std::size_t j = 0; j < u.count; ++j) {
      if (j == k) continue;
      const double proj = kernels::dot(u.col(j), cand.data(), len);
      kernels::axpy(cand.data(), -proj, u.col(j), len);
    }
    const double norm_sq = kernels::nrm2_sq(cand.data(), len);
    if (norm_sq > best_norm_sq) {
      best_norm_sq = norm_sq;
      best = cand;
    }
    if (best_norm_sq > 0.5) break;  // good enough, stop scanning
  }
  // Second projection pass tightens orthogonality when the residual is small.
  for (std::size_t j = 0; j < u.count; ++j) {
    if (j == k) continue;
    const double proj = kernels::dot(u.col(j), best.data(), len);
    kernels::axpy(best.data(), -proj, u.col(j), len);
  }
  const double inv = 1.0 / std::sqrt(kernels::nrm2_sq(best.data(), len));
  for (std::size_t i = 0; i < len; ++i) u.col(k)[i] = best[i] * inv;
}

}  // namespace

Svd jacobi_svd(const Matrix& a, const Matrix* warm_v) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (rows == 0 || cols == 0) return {Matrix(rows, 0), {}, Matrix(cols, 0)};

  const bool tall = rows >= cols;
  const std::size_t r = tall ? rows : cols;  // vector length
  const std::size_t c = tall ? cols : rows;  // number of columns = k

  ColumnSet w(r, c);
  for (std::size_t k = 0; k < c; ++k) {
    double* wk = w.col(k);
    for (std::size_t i = 0; i < r; ++i) wk[i] = tall ? a(i, k) : a(k, i);
  }

  ColumnSet v(c, c);
  if (warm_v != nullptr) {
    if (warm_v->rows() != c || warm_v->cols() != c)
      throw std::invalid_argument("warm-start factor has wrong shape");
    // W <- W * warm, V <- warm; preserves the invariant W = A_tall * V.
    ColumnSet raw = w;
    for (std::size_t k = 0; k < c; ++k) {
      double* wk = w.col(k);
      std::fill(wk, wk + r, 0.0);
      double* vk = v.col(k);
      for (std::size_t j = 0; j < c; ++j) {
        const double coef = (*warm_v)(j, k);
        vk[j] = coef;
        if (coef != 0.0) kernels::axpy(wk, coef, raw.col(j), r);
      }
    }
  } else {
    for (std::size_t k = 0; k < c; ++k) v.col(k)[k] = 1.0;
  }

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < c; ++i) {
      for (std::size_t j = i + 1; j < c; ++j) {
        double* wi = w.col(i);
        double* wj = w.col(j);
        const double alpha = kernels::nrm2_sq(wi, r);
        const double beta = kernels::nrm2_sq(wj, r);
        if (alpha == 0.0 || beta == 0.0) continue;
        const double gamma = kernels::dot(wi, wj, r);
        if (std::fabs(gamma) <= kOrthTol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (alpha - beta) / (2.0 * gamma);
        const double t =
            std::copysign(1.0, zeta) / (std::fabs(zeta) + std::hypot(1.0, zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        kernels::rot(wi, wj, cs, sn, r);
        kernels::rot(v.col(i), v.col(j), cs, sn, c);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(c);
  for (std::size_t k = 0; k < c; ++k) sigma[k] = std::sqrt(kernels::nrm2_sq(w.col(k), r));

  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  ColumnSet u_sorted(r, c);
  ColumnSet v_sorted(c, c);
  std::vector<double> sigma_sorted(c);
  for (std::size_t k = 0; k < c; ++k) {
    const std::size_t src = order[k];
    sigma_sorted[k] = sigma[src];
    std::copy(v.col(src), v.col(src) + c, v_sorted.col(k));
    if (sigma[src] > 0.0) {
      const double inv = 1.0 / sigma[src];
      const double* wsrc = w.col(src);
      double* dst = u_sorted.col(k);
      for (std::size_t i = 0; i < r; ++i) dst[i] = wsrc[i] * inv;
    }
  }
  for (std::size_t k = 0; k < c; ++k)
    if (sigma_sorted[k] == 0.0) complete_column(u_sorted, k);

  // Long-side factor from u_sorted, short-side factor from v_sorted.
  Matrix longf(r, c);
  for (std::size_t k = 0; k < c; ++k) {
    const double* src = u_sorted.col(k);
    for (std::size_t i = 0; i < r; ++i) longf(i, k) = src[i];
  }
  Matrix shortf(c, c);
  for (std::size_t k = 0; k < c; ++k) {
    const double* src = v_sorted.col(k);
    for (std::size_t i = 0; i < c; ++i) shortf(i, k) = src[i];
  }

  if (tall) return {std::move(longf), std::move(sigma_sorted), std::move(shortf)};
  // A = (A')' = V_b Sigma U_b' for the decomposition of A' above.
  return {std::move(shortf), std::move(sigma_sorted), std::move(longf)};
}

Svd truncated_svd(const Matrix& a, std::size_t r) {
  const std::size_t k_max = std::min(a.rows(), a.cols());
  if (r < 1 || r > k_max)
    throw std::invalid_argument("truncated_svd: rank must be in [1, min(rows, cols)]");
  Svd full = jacobi_svd(a);
  if (r == k_max) return full;
  Svd out;
  out.sigma.assign(full.sigma.begin(), full.sigma.begin() + r);
  out.U = Matrix(a.rows(), r);
  out.V = Matrix(a.cols(), r);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < a.rows(); ++i) out.U(i, k) = full.U(i, k);
    for (std::size_t j = 0; j < a.cols(); ++j) out.V(j, k) = full.V(j, k);
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Svd s = jacobi_svd(a);
  return s.sigma.empty() ? 0.0 : s.sigma.front();
}

Matrix svd_reconstruct(const Matrix& u, const std::vector<double>& sigma,
                       const Matrix& v) {
  if (u.cols() != sigma.size() || v.cols() != sigma.size())
    throw std::invalid_argument("svd_reconstruct: factor shapes disagree");
  Matrix out(u.rows(), v.rows());
  std::vector<double> ucol(u.rows());
  std::vector<double> vcol(v.rows());
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (sigma[k] == 0.0) continue;
    for (std::size_t i = 0; i < u.rows(); ++i) ucol[i] = u(i, k);
    for (std::size_t j = 0; j < v.rows(); ++j) vcol[j] = v(j, k);
    kernels::ger(out.data(), out.rows(), out.cols(), sigma[k], ucol.data(), vcol.data());
  }
  return out;
}

}  // namespace specsense::linalg
