#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel primitives behind all linear algebra in this project.
// Every primitive has a scalar reference implementation and, on x86-64
// hardware that supports it, an AVX2/FMA variant. The variant is picked
// once at startup (cpuid), can be forced with the SPECSENSE_KERNELS
// environment variable (values: "scalar", "avx2"), and is overridable at
// runtime for equivalence testing.

namespace specsense::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);

// Currently active backend.
Backend active_backend();

// Force a backend. Returns false (and leaves the selection unchanged) if
// the requested backend is not supported on this CPU. Not meant to be
// called while kernels are running on other threads.
bool set_backend(Backend b);

// True if the CPU supports the given backend.
bool backend_supported(Backend b);

//  sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

//  sum_i x[i]^2
double nrm2_sq(const double* x, std::size_t n);

//  sum_i (a[i]-b[i])^2
double diff_nrm2_sq(const double* a, const double* b, std::size_t n);

//  max_i |x[i]|
double max_abs(const double* x, std::size_t n);

//  y[i] += alpha*x[i]
void axpy(double* y, double alpha, const double* x, std::size_t n);

//  x[i] *= alpha
void scal(double* x, double alpha, std::size_t n);

//  plane rotation: (x[i], y[i]) <- (c*x[i] + s*y[i], c*y[i] - s*x[i])
void rot(double* x, double* y, double c, double s, std::size_t n);

//  x[i] <- max(x[i] - alpha, 0)
void soft_threshold(double* x, double alpha, std::size_t n);

//  out[i] <- mk[i] - delta*(mk[i] - values[i]) where mask[i] != 0,
//  out[i] <- mk[i] elsewhere. out may alias mk.
void masked_grad_step(double* out, const double* mk, const double* values,
                      const std::uint8_t* mask, double delta, std::size_t n);

//  sum over mask[i] != 0 of (a[i] - values[i])^2
double masked_diff_sq(const double* a, const double* values,
                      const std::uint8_t* mask, std::size_t n);

// Composite operations on row-major matrices, built on the primitives.

//  y = A x   (A is rows x cols, row-major)
void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y);

//  y = A' x
void matvec_t(const double* a, std::size_t rows, std::size_t cols,
              const double* x, double* y);

//  A += alpha * x y'
void ger(double* a, std::size_t rows, std::size_t cols, double alpha,
         const double* x, const double* y);

namespace detail {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*nrm2_sq)(const double*, std::size_t);
  double (*diff_nrm2_sq)(const double*, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*axpy)(double*, double, const double*, std::size_t);
  void (*scal)(double*, double, std::size_t);
  void (*rot)(double*, double*, double, double, std::size_t);
  void (*soft_threshold)(double*, double, std::size_t);
  void (*masked_grad_step)(double*, const double*, const double*,
                           const std::uint8_t*, double, std::size_t);
  double (*masked_diff_sq)(const double*, const double*, const std::uint8_t*,
                           std::size_t);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in / unsupported

}  // namespace detail

}  // namespace specsense::kernels
