#include <cmath>
#include <random>

#include <doctest.h>

#include "sgntk/errors.hpp"
#include "sgntk/linalg.hpp"

using namespace sgntk;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  Matrix m(r, c);
  for (double& v : m.entries()) v = n01(gen);
  return m;
}

Matrix random_spd(std::size_t n, unsigned seed) {
  const Matrix a = random_matrix(n, n, seed);
  Matrix s = a * a.transposed();
  for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.5;
  return s;
}

}  // namespace

TEST_CASE("solve_spd small cases") {
  const Matrix b = Matrix::column(std::vector<double>{1.0, -2.0, 3.0});
  CHECK(solve_spd(Matrix::identity(3), b) == b);
  const Matrix x = solve_spd(Matrix::diagonal(std::vector<double>{2.0, 4.0}), Matrix::column(std::vector<double>{2.0, 4.0}));
  CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("solve_spd residual on a random 15x15 system") {
  const Matrix a = random_spd(15, 3);
  const Matrix b = random_matrix(15, 2, 4);
  const Matrix x = solve_spd(a, b);
  CHECK((a * x - b).max_abs() < 1e-10);
}

TEST_CASE("cholesky reconstructs and jitters near-singular input") {
  const Matrix a = random_spd(8, 5);
  const CholeskyFactor f = cholesky(a);
  CHECK(f.jitter == 0.0);
  CHECK((f.lower * f.lower.transposed() - a).max_abs() < 1e-12);

  Matrix ones(3, 3, 1.0);
  const CholeskyFactor g = cholesky(ones);
  CHECK(g.jitter > 0.0);
  CHECK_THROWS_AS(cholesky(-1.0 * Matrix::identity(2)), Error);
}

TEST_CASE("solve_lu handles asymmetric systems") {
  const Matrix a = random_matrix(12, 12, 7);
  const Matrix b = random_matrix(12, 3, 8);
  CHECK((a * solve_lu(a, b) - b).max_abs() < 1e-10);
  try {
    solve_lu(Matrix(2, 2, 0.0), Matrix::identity(2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SingularGram);
  }
}

TEST_CASE("eig_sym known spectra and reconstruction") {
  SymEig e = eig_sym(Matrix::diagonal(std::vector<double>{3.0, 1.0, 2.0}));
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(e.values[2] == doctest::Approx(3.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));

  e = eig_sym(Matrix(2, 2, std::vector<double>{0, 1, 1, 0}));
  CHECK(e.values[0] == doctest::Approx(-1.0));
  CHECK(e.values[1] == doctest::Approx(1.0));

  const Matrix r = random_matrix(10, 10, 9);
  const Matrix s = symmetrized(r);
  e = eig_sym(s);
  const Matrix back = e.vectors * Matrix::diagonal(e.values) * e.vectors.transposed();
  CHECK((back - s).max_abs() < 1e-11);
  CHECK((e.vectors.transposed() * e.vectors - Matrix::identity(10)).max_abs() < 1e-12);
}

TEST_CASE("matrix_exp") {
  CHECK((matrix_exp(Matrix(4, 4, 0.0), 1.0) - Matrix::identity(4)).max_abs() == 0.0);
  const Matrix d = matrix_exp(Matrix::diagonal(std::vector<double>{1.0, -1.0}), 1.0);
  CHECK(d(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(d(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(d(0, 1) == 0.0);

  // oracle: 1024-fold product of a long Taylor series at t/1024, in long double
  const Matrix a = 0.4 * random_matrix(8, 8, 10);
  const double t = 1.3;
  const std::size_t n = 8;
  std::vector<long double> step(n * n, 0.0L), term(n * n, 0.0L), next(n * n);
  for (std::size_t i = 0; i < n; ++i) step[i * n + i] = term[i * n + i] = 1.0L;
  const long double h = t / 1024.0L;
  for (int k = 1; k < 30; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long double s = 0.0L;
        for (std::size_t q = 0; q < n; ++q) s += term[i * n + q] * a(q, j);
        next[i * n + j] = s * h / k;
      }
    term = next;
    for (std::size_t i = 0; i < n * n; ++i) step[i] += term[i];
  }
  for (int sq = 0; sq < 10; ++sq) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long double s = 0.0L;
        for (std::size_t q = 0; q < n; ++q) s += step[i * n + q] * step[q * n + j];
        next[i * n + j] = s;
      }
    step = next;
  }
  const Matrix e = matrix_exp(a, t);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(e(i, j) - static_cast<double>(step[i * n + j])) / (1.0 + std::abs(e(i, j))));
  CHECK(worst < 1e-12);
}

TEST_CASE("matrix helpers") {
  const Matrix a(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(a.transposed()(2, 1) == 6.0);
  CHECK(a.frobenius_norm() == doctest::Approx(std::sqrt(91.0)));
  const std::vector<double> y = multiply(a, std::vector<double>{1.0, 0.0, -1.0});
  CHECK(y[0] == -2.0);
  CHECK(y[1] == -2.0);
  CHECK_THROWS_AS(a * a, Error);
  CHECK(symmetrized(Matrix(2, 2, std::vector<double>{0, 2, 0, 0}))(1, 0) == 1.0);
}
