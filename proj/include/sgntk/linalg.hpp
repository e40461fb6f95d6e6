#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgntk {

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return entries_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return entries_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {entries_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {entries_.data() + r * cols_, cols_};
  }
  std::span<double> entries() noexcept { return entries_; }
  std::span<const double> entries() const noexcept { return entries_; }

  Matrix transposed() const;
  std::vector<double> column_vector(std::size_t c) const;

  double frobenius_norm() const noexcept;
  double max_abs() const noexcept;
  double trace() const noexcept;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double scale, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, std::span<const double> x);

/// (A + A^T) / 2
Matrix symmetrized(const Matrix& a);

struct SymEig {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;  // diagonal shift that made the factorization succeed
};

/// Cholesky with the jitter ladder 0, 1e-12*tr/n, x10 ... up to 1e-6*tr/n.
CholeskyFactor cholesky(const Matrix& a);

/// Solves A X = B for symmetric positive definite A. Iterative refinement
/// against the unshifted A follows whenever jitter was needed.
Matrix solve_spd(const Matrix& a, const Matrix& b);

/// Solves A X = B by Gaussian elimination with partial pivoting.
Matrix solve_lu(const Matrix& a, const Matrix& b);

/// Cyclic Jacobi eigensolver for symmetric matrices.
SymEig eig_sym(const Matrix& a);

/// exp(t A) by scaling and squaring with a truncated Taylor series.
Matrix matrix_exp(const Matrix& a, double t);

}  // namespace sgntk
