#pragma once

#include <cstddef>
#include <vector>

#include "specsense/linalg/matrix.hpp"

namespace specsense::linalg {

// Thin SVD factors: A ~= U * diag(sigma) * V'. U is rows x k, V is cols x k,
// sigma sorted descending.
struct Svd {
  Matrix U;
  std::vector<double> sigma;
  Matrix V;
};

// Full thin SVD (k = min(rows, cols)) by one-sided Jacobi rotations.
// Deterministic; singular vectors for zero singular values are completed to
// an orthonormal set. `warm_v` (cols x k, approximately the right singular
// vectors of a nearby matrix; rows x k when rows < cols, matching U) speeds
// up convergence and must be orthonormal if given.
Svd jacobi_svd(const Matrix& a, const Matrix* warm_v = nullptr);

// Rank-r factors: top r singular triplets of the full decomposition.
// Throws std::invalid_argument unless 1 <= r <= min(rows, cols).
Svd truncated_svd(const Matrix& a, std::size_t r);

// Largest singular value (0 for an empty/zero matrix).
double spectral_norm(const Matrix& a);

// U * diag(sigma) * V' for thin factors.
Matrix svd_reconstruct(const Matrix& u, const std::vector<double>& sigma,
                       const Matrix& v);

}  // namespace specsense::linalg
