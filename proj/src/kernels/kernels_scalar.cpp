// Scalar reference kernels. These define the semantics; the SIMD variants
// are tested for equivalence against them.

#include "specsense/kernels/kernels.hpp"

#include <cmath>

namespace specsense::kernels::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double nrm2_sq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double diff_nrm2_sq_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - s * xi;
  }
}

void soft_threshold_scalar(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(x[i] - alpha, 0.0);
}

void masked_grad_step_scalar(double* out, const double* mk, const double* values,
                             const std::uint8_t* mask, double delta, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mask[i] ? 1.0 : 0.0;
    out[i] = mk[i] - (delta * m) * (mk[i] - values[i]);
  }
}

double masked_diff_sq_scalar(const double* a, const double* values,
                             const std::uint8_t* mask, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mask[i] ? 1.0 : 0.0;
    const double d = (a[i] - values[i]) * m;
    acc += d * d;
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table = {
      dot_scalar,           nrm2_sq_scalar,       diff_nrm2_sq_scalar,
      max_abs_scalar,       axpy_scalar,          scal_scalar,
      rot_scalar,           soft_threshold_scalar, masked_grad_step_scalar,
      masked_diff_sq_scalar,
  };
  return table;
}

}  // namespace specsense::kernels::detail
