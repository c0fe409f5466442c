#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "specsense/linalg/matrix.hpp"

namespace specsense::linalg {

// Dense LU with partial pivoting for small square systems (simplex bases).
class Lu {
 public:
  explicit Lu(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t pivot = k;
      double best = std::fabs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const double v = std::fabs(lu_(i, k));
        if (v > best) {
          best = v;
          pivot = i;
        }
      }
      if (pivot != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pivot, j));
        std::swap(perm_[k], perm_[pivot]);
      }
      const double diag = lu_(k, k);
      if (std::fabs(diag) < 1e-300) {
        singular_ = true;
        continue;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = lu_(i, k) / diag;
        lu_(i, k) = f;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  bool singular() const noexcept { return singular_; }

  // x solving A x = b.
  std::vector<double> solve(const std::vector<double>& b) const {
    const std::size_t n = lu_.rows();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu_(ii, j) * x[j];
      x[ii] /= lu_(ii, ii);
    }
    return x;
  }

  // x solving A' x = b.
  std::vector<double> solve_transpose(const std::vector<double>& b) const {
    const std::size_t n = lu_.rows();
    std::vector<double> z(b);
    // U' is lower triangular with U's diagonal.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) z[i] -= lu_(j, i) * z[j];
      z[i] /= lu_(i, i);
    }
    // L' is unit upper triangular.
    for (std::size_t ii = n; ii-- > 0;)
      for (std::size_t j = ii + 1; j < n; ++j) z[ii] -= lu_(j, ii) * z[j];
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = z[i];
    return x;
  }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

}  // namespace specsense::linalg
