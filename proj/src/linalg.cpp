#include "sgntk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sgntk/errors.hpp"

namespace sgntk {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    raise(Errc::DimensionMismatch, "Matrix: entry count does not match shape");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::vector<double> Matrix::column_vector(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

double Matrix::frobenius_norm() const noexcept {
  double sum = 0.0;
  for (double v : entries_) sum += v * v;
  return std::sqrt(sum);
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) raise(Errc::DimensionMismatch, "Matrix +=");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) raise(Errc::DimensionMismatch, "Matrix -=");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

Matrix& Matrix::operator*=(double scale) noexcept {
  for (double& v : entries_) v *= scale;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double scale, Matrix a) { return a *= scale; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) raise(Errc::DimensionMismatch, "Matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) raise(Errc::DimensionMismatch, "matrix-vector product");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

Matrix symmetrized(const Matrix& a) {
  if (!a.is_square()) raise(Errc::DimensionMismatch, "symmetrized: matrix not square");
  Matrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

namespace {

void require_square(const Matrix& a, const char* who) {
  if (!a.is_square()) raise(Errc::DimensionMismatch, std::string(who) + ": matrix not square");
}

void require_symmetric(const Matrix& a, const char* who) {
  require_square(a, who);
  const double tol = 1e-10 * std::max(a.max_abs(), 1e-300);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) {
        raise(Errc::InvalidArgument, std::string(who) + ": matrix not symmetric");
      }
}

bool try_cholesky(const Matrix& a, double shift, Matrix& lower) {
  const std::size_t n = a.rows();
  lower = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) + shift;
    for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.5 * (a(i, j) + a(j, i));
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  return true;
}

Matrix cholesky_solve(const Matrix& lower, const Matrix& b) {
  const std::size_t n = lower.rows();
  Matrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * x(k, c);
      x(i, c) = s / lower(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x(i, c);
      for (std::size_t k = i + 1; k < n; ++k) s -= lower(k, i) * x(k, c);
      x(i, c) = s / lower(i, i);
    }
  }
  return x;
}

double one_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += std::abs(a(r, c));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

CholeskyFactor cholesky(const Matrix& a) {
  require_symmetric(a, "cholesky");
  const std::size_t n = a.rows();
  CholeskyFactor f;
  if (n == 0) return f;
  if (try_cholesky(a, 0.0, f.lower)) return f;
  const double base = std::abs(a.trace()) / static_cast<double>(n);
  for (double rel = 1e-12; rel <= 1e-6 * (1.0 + 1e-9); rel *= 10.0) {
    if (try_cholesky(a, rel * base, f.lower)) {
      f.jitter = rel * base;
      return f;
    }
  }
  raise(Errc::NotPositiveDefinite, "cholesky: jitter ladder exhausted");
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) raise(Errc::DimensionMismatch, "solve_spd: row mismatch");
  const CholeskyFactor f = cholesky(a);
  Matrix x = cholesky_solve(f.lower, b);
  // Refinement against the original A; also mops up roundoff on
  // ill-conditioned Gram matrices when no jitter was used.
  double prev = (a * x - b).frobenius_norm();
  for (int iter = 0; iter < 4 && prev > 0.0; ++iter) {
    const Matrix residual = b - a * x;
    const Matrix candidate = x + cholesky_solve(f.lower, residual);
    const double next = (a * candidate - b).frobenius_norm();
    if (!(next < prev)) break;
    x = candidate;
    prev = next;
  }
  return x;
}

Matrix solve_lu(const Matrix& a, const Matrix& b) {
  require_square(a, "solve_lu");
  if (a.rows() != b.rows()) raise(Errc::DimensionMismatch, "solve_lu: row mismatch");
  const std::size_t n = a.rows();
  Matrix lu = a;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const double scale = std::max(a.max_abs(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
    if (std::abs(lu(pivot, k)) <= 1e-15 * scale) raise(Errc::SingularGram, "solve_lu: singular matrix");
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(k, c), lu(pivot, c));
      std::swap(perm[k], perm[pivot]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) / lu(k, k);
      lu(i, k) = factor;
      for (std::size_t c = k + 1; c < n; ++c) lu(i, c) -= factor * lu(k, c);
    }
  }
  auto substitute = [&](const Matrix& rhs) {
    Matrix x(n, rhs.cols());
    for (std::size_t c = 0; c < rhs.cols(); ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = rhs(perm[i], c);
        for (std::size_t k = 0; k < i; ++k) s -= lu(i, k) * x(k, c);
        x(i, c) = s;
      }
      for (std::size_t i = n; i-- > 0;) {
        double s = x(i, c);
        for (std::size_t k = i + 1; k < n; ++k) s -= lu(i, k) * x(k, c);
        x(i, c) = s / lu(i, i);
      }
    }
    return x;
  };
  Matrix x = substitute(b);
  double prev = (a * x - b).frobenius_norm();
  for (int iter = 0; iter < 3 && prev > 0.0; ++iter) {
    const Matrix candidate = x + substitute(b - a * x);
    const double next = (a * candidate - b).frobenius_norm();
    if (!(next < prev)) break;
    x = candidate;
    prev = next;
  }
  return x;
}

SymEig eig_sym(const Matrix& input) {
  require_symmetric(input, "eig_sym");
  const std::size_t n = input.rows();
  Matrix a = symmetrized(input);
  Matrix v = Matrix::identity(n);
  const double norm = a.frobenius_norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= 1e-15 * norm || norm == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) raise(Errc::NoConvergence, "eig_sym: sweep cap reached");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEig out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

Matrix matrix_exp(const Matrix& a, double t) {
  require_square(a, "matrix_exp");
  if (!a.all_finite() || !std::isfinite(t)) raise(Errc::NonFinite, "matrix_exp: non-finite input");
  const std::size_t n = a.rows();
  Matrix m = t * a;
  const double norm = one_norm(m);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  m *= std::ldexp(1.0, -squarings);

  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k < 100; ++k) {
    term = (1.0 / k) * (term * m);
    sum += term;
    if (one_norm(term) < 1e-16 * one_norm(sum)) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  if (!sum.all_finite()) raise(Errc::NonFinite, "matrix_exp: overflow");
  return sum;
}

}  // namespace sgntk
