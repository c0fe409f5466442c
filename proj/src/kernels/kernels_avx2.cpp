// AVX2/FMA kernel variants. Compiled with -mavx2 -mfma on x86-64 only;
// selected at runtime after a cpuid check.

#include "specsense/kernels/kernels.hpp"

#if defined(SPECSENSE_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace specsense::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, swapped));
}

// 4 mask bytes -> lanes of 0.0/1.0
inline __m256d mask4_to_pd(const std::uint8_t* mask) {
  __m128i bytes = _mm_cvtsi32_si128(static_cast<int>(
      static_cast<std::uint32_t>(mask[0]) | (static_cast<std::uint32_t>(mask[1]) << 8) |
      (static_cast<std::uint32_t>(mask[2]) << 16) |
      (static_cast<std::uint32_t>(mask[3]) << 24)));
  __m128i lanes = _mm_cvtepu8_epi32(bytes);
  __m128i nonzero = _mm_cmpgt_epi32(lanes, _mm_setzero_si128());  // 0 or -1
  return _mm256_sub_pd(_mm256_setzero_pd(), _mm256_cvtepi32_pd(nonzero));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double nrm2_sq_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
  }
  double acc = hsum(acc0);
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double diff_nrm2_sq_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double acc = hsum(acc0);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    best = _mm256_max_pd(best, _mm256_and_pd(_mm256_loadu_pd(x + i), absmask));
  double m = hmax(best);
  for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_avx2(double* x, double alpha, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void rot_avx2(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmadd_pd(vc, vx, _mm256_mul_pd(vs, vy)));
    _mm256_storeu_pd(y + i, _mm256_fmsub_pd(vc, vy, _mm256_mul_pd(vs, vx)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - s * xi;
  }
}

void soft_threshold_avx2(double* x, double alpha, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(x + i), va);
    _mm256_storeu_pd(x + i, _mm256_max_pd(v, zero));
  }
  for (; i < n; ++i) x[i] = std::max(x[i] - alpha, 0.0);
}

void masked_grad_step_avx2(double* out, const double* mk, const double* values,
                           const std::uint8_t* mask, double delta, std::size_t n) {
  const __m256d vd = _mm256_set1_pd(delta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vm = _mm256_loadu_pd(mk + i);
    __m256d diff = _mm256_sub_pd(vm, _mm256_loadu_pd(values + i));
    __m256d dm = _mm256_mul_pd(vd, mask4_to_pd(mask + i));
    _mm256_storeu_pd(out + i, _mm256_fnmadd_pd(dm, diff, vm));
  }
  for (; i < n; ++i) {
    const double m = mask[i] ? 1.0 : 0.0;
    out[i] = mk[i] - (delta * m) * (mk[i] - values[i]);
  }
}

double masked_diff_sq_avx2(const double* a, const double* values,
                           const std::uint8_t* mask, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(values + i));
    d = _mm256_mul_pd(d, mask4_to_pd(mask + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double acc = hsum(acc0);
  for (; i < n; ++i) {
    const double m = mask[i] ? 1.0 : 0.0;
    const double d = (a[i] - values[i]) * m;
    acc += d * d;
  }
  return acc;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table = {
      dot_avx2,           nrm2_sq_avx2,        diff_nrm2_sq_avx2,
      max_abs_avx2,       axpy_avx2,           scal_avx2,
      rot_avx2,           soft_threshold_avx2, masked_grad_step_avx2,
      masked_diff_sq_avx2,
  };
  return &table;
}

}  // namespace specsense::kernels::detail

#else

namespace specsense::kernels::detail {

const KernelTable* avx2_table() { return nullptr; }

}  // namespace specsense::kernels::detail

#endif  // SPECSENSE_HAVE_AVX2
