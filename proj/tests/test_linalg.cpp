#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "specsense/linalg/lu.hpp"
#include "specsense/linalg/matrix.hpp"
#include "specsense/linalg/svd.hpp"
#include "specsense/rng.hpp"

using specsense::linalg::Matrix;

namespace {

Matrix random_matrix(specsense::rng::Random& r, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = r.normal();
  return m;
}

Matrix random_low_rank(specsense::rng::Random& r, std::size_t rows, std::size_t cols,
                       std::size_t rank) {
  Matrix m(rows, cols);
  for (std::size_t k = 0; k < rank; ++k) {
    std::vector<double> u(rows), v(cols);
    for (double& x : u) x = r.normal();
    for (double& x : v) x = r.normal();
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) += u[i] * v[j];
  }
  return m;
}

double gram_deviation(const Matrix& u) {
  double worst = 0.0;
  for (std::size_t a = 0; a < u.cols(); ++a) {
    for (std::size_t b = 0; b < u.cols(); ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < u.rows(); ++i) acc += u(i, a) * u(i, b);
      const double want = (a == b) ? 1.0 : 0.0;
      worst = std::max(worst, std::fabs(acc - want));
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("jacobi svd matches the independent oracle on random shapes") {
  specsense::rng::Random r(101);
  const std::pair<std::size_t, std::size_t> shapes[] = {
      {5, 4}, {4, 5}, {6, 6}, {40, 20}, {20, 40}, {1, 8}, {8, 1}};
  for (auto [rows, cols] : shapes) {
    const Matrix a = random_matrix(r, rows, cols);
    const auto f = specsense::linalg::jacobi_svd(a);
    const auto oracle_sigma = oracles::singular_values(a);

    REQUIRE(f.sigma.size() == std::min(rows, cols));
    for (std::size_t i = 0; i < f.sigma.size(); ++i)
      CHECK(f.sigma[i] ==
            doctest::Approx(oracle_sigma[i]).epsilon(1e-10).scale(oracle_sigma[0]));

    CHECK(gram_deviation(f.U) < 1e-8);
    CHECK(gram_deviation(f.V) < 1e-8);

    const Matrix rebuilt = specsense::linalg::svd_reconstruct(f.U, f.sigma, f.V);
    CHECK(oracles::frob_diff(rebuilt, a) < 1e-10 * std::max(1.0, oracles::frob(a)));
  }
}

TEST_CASE("rank-deficient matrices keep orthonormal factors") {
  specsense::rng::Random r(103);
  const Matrix a = random_low_rank(r, 8, 6, 2);
  const auto f = specsense::linalg::jacobi_svd(a);
  CHECK(gram_deviation(f.U) < 1e-8);
  CHECK(gram_deviation(f.V) < 1e-8);
  CHECK(f.sigma[2] < 1e-12 * f.sigma[0]);
  const Matrix rebuilt = specsense::linalg::svd_reconstruct(f.U, f.sigma, f.V);
  CHECK(oracles::frob_diff(rebuilt, a) < 1e-10 * oracles::frob(a));
}

TEST_CASE("zero matrix factors stay orthonormal") {
  const Matrix zero(5, 3);
  const auto f = specsense::linalg::jacobi_svd(zero);
  for (double s : f.sigma) CHECK(s == 0.0);
  CHECK(gram_deviation(f.U) < 1e-12);
  CHECK(gram_deviation(f.V) < 1e-12);
}

TEST_CASE("truncated svd keeps the leading triplets") {
  const Matrix a = Matrix::from_rows({{5, 0, 0}, {0, 3, 0}, {0, 0, 1}});
  const auto f = specsense::linalg::truncated_svd(a, 2);
  REQUIRE(f.sigma.size() == 2);
  CHECK(f.sigma[0] == doctest::Approx(5.0));
  CHECK(f.sigma[1] == doctest::Approx(3.0));
}

TEST_CASE("truncated svd is exact at the true rank") {
  specsense::rng::Random r(107);
  const Matrix a = random_low_rank(r, 9, 5, 1);
  const auto f = specsense::linalg::truncated_svd(a, 1);
  const Matrix rebuilt = specsense::linalg::svd_reconstruct(f.U, f.sigma, f.V);
  CHECK(oracles::frob_diff(rebuilt, a) < 1e-10 * oracles::frob(a));
}

TEST_CASE("truncated svd satisfies the Eckart-Young tail identity") {
  specsense::rng::Random r(109);
  const Matrix a = random_matrix(r, 40, 20);
  const std::size_t rank = 5;
  const auto f = specsense::linalg::truncated_svd(a, rank);
  const Matrix approx = specsense::linalg::svd_reconstruct(f.U, f.sigma, f.V);

  const auto sigma = oracles::singular_values(a);
  double tail = 0.0;
  for (std::size_t i = rank; i < sigma.size(); ++i) tail += sigma[i] * sigma[i];

  const double err = oracles::frob_diff(approx, a);
  CHECK(err * err == doctest::Approx(tail).epsilon(1e-8));
}

TEST_CASE("truncated svd rejects out-of-range ranks") {
  const Matrix a(4, 3);
  CHECK_THROWS_AS(specsense::linalg::truncated_svd(a, 0), std::invalid_argument);
  CHECK_THROWS_AS(specsense::linalg::truncated_svd(a, 4), std::invalid_argument);
}

TEST_CASE("warm-started svd agrees with the cold factorization") {
  specsense::rng::Random r(113);
  const Matrix a = random_matrix(r, 12, 7);
  const auto cold = specsense::linalg::jacobi_svd(a);

  Matrix perturbed = a;
  for (std::size_t i = 0; i < perturbed.rows(); ++i)
    for (std::size_t j = 0; j < perturbed.cols(); ++j)
      perturbed(i, j) += 1e-3 * r.normal();

  const auto warm = specsense::linalg::jacobi_svd(perturbed, &cold.V);
  const auto reference = oracles::singular_values(perturbed);
  for (std::size_t i = 0; i < warm.sigma.size(); ++i)
    CHECK(warm.sigma[i] ==
          doctest::Approx(reference[i]).epsilon(1e-10).scale(reference[0]));
  const Matrix rebuilt = specsense::linalg::svd_reconstruct(warm.U, warm.sigma, warm.V);
  CHECK(oracles::frob_diff(rebuilt, perturbed) < 1e-10 * oracles::frob(perturbed));
}

TEST_CASE("lu solves square systems and their transposes") {
  specsense::rng::Random r(127);
  const std::size_t n = 9;
  const Matrix a = random_matrix(r, n, n);
  std::vector<double> x_true(n);
  for (double& v : x_true) v = r.normal();

  std::vector<double> b(n, 0.0), bt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      b[i] += a(i, j) * x_true[j];
      bt[i] += a(j, i) * x_true[j];
    }

  const specsense::linalg::Lu lu(a);
  REQUIRE(!lu.singular());
  const auto x = lu.solve(b);
  const auto xt = lu.solve_transpose(bt);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-10));
    CHECK(xt[i] == doctest::Approx(x_true[i]).epsilon(1e-10));
  }
}

}  // TEST_SUITE
