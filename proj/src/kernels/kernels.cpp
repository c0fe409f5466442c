// Backend selection and the composite matrix operations.

#include "specsense/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace specsense::kernels {

namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Selection {
  const KernelTable* table;
  Backend backend;
};

Selection initial_selection() {
  Backend want = cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("SPECSENSE_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) want = Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) want = Backend::avx2;
  }
  if (want == Backend::avx2) {
    if (const KernelTable* t = detail::avx2_table()) return {t, Backend::avx2};
  }
  return {&detail::scalar_table(), Backend::scalar};
}

std::atomic<const KernelTable*>& table_slot() {
  static std::atomic<const KernelTable*> slot{initial_selection().table};
  return slot;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_selection().backend};
  return slot;
}

inline const KernelTable& tab() {
  return *table_slot().load(std::memory_order_relaxed);
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::avx2: return "avx2";
    case Backend::scalar: return "scalar";
  }
  return "scalar";
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

bool backend_supported(Backend b) {
  if (b == Backend::scalar) return true;
  return cpu_has_avx2() && detail::avx2_table() != nullptr;
}

bool set_backend(Backend b) {
  if (!backend_supported(b)) return false;
  const KernelTable* t =
      (b == Backend::avx2) ? detail::avx2_table() : &detail::scalar_table();
  table_slot().store(t, std::memory_order_relaxed);
  backend_slot().store(b, std::memory_order_relaxed);
  return true;
}

double dot(const double* a, const double* b, std::size_t n) { return tab().dot(a, b, n); }

double nrm2_sq(const double* x, std::size_t n) { return tab().nrm2_sq(x, n); }

double diff_nrm2_sq(const double* a, const double* b, std::size_t n) {
  return tab().diff_nrm2_sq(a, b, n);
}

double max_abs(const double* x, std::size_t n) { return tab().max_abs(x, n); }

void axpy(double* y, double alpha, const double* x, std::size_t n) {
  tab().axpy(y, alpha, x, n);
}

void scal(double* x, double alpha, std::size_t n) { tab().scal(x, alpha, n); }

void rot(double* x, double* y, double c, double s, std::size_t n) {
  tab().rot(x, y, c, s, n);
}

void soft_threshold(double* x, double alpha, std::size_t n) {
  tab().soft_threshold(x, alpha, n);
}

void masked_grad_step(double* out, const double* mk, const double* values,
                      const std::uint8_t* mask, double delta, std::size_t n) {
  tab().masked_grad_step(out, mk, values, mask, delta, n);
}

double masked_diff_sq(const double* a, const double* values, const std::uint8_t* mask,
                      std::size_t n) {
  return tab().masked_diff_sq(a, values, mask, n);
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x,
            double* y) {
  const KernelTable& t = tab();
  for (std::size_t r = 0; r < rows; ++r) y[r] = t.dot(a + r * cols, x, cols);
}

void matvec_t(const double* a, std::size_t rows, std::size_t cols, const double* x,
              double* y) {
  const KernelTable& t = tab();
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) t.axpy(y, x[r], a + r * cols, cols);
}

void ger(double* a, std::size_t rows, std::size_t cols, double alpha, const double* x,
         const double* y) {
  const KernelTable& t = tab();
  for (std::size_t r = 0; r < rows; ++r) t.axpy(a + r * cols, alpha * x[r], y, cols);
}

}  // namespace specsense::kernels
