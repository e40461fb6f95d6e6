#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sgntk/linalg.hpp"

namespace sgntk {

/// Dense kernel Gram matrix. Divergent entries are flagged, never stored as
/// infinity; their value slot holds the divergence rate coefficient (0 when
/// no rate is known).
struct KernelMatrix {
  Matrix values;
  std::vector<unsigned char> divergent;  // row-major flags; empty when nothing diverges

  KernelMatrix() = default;
  explicit KernelMatrix(Matrix m) : values(std::move(m)) {}

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }
  bool any_divergent() const noexcept;
  bool is_divergent(std::size_t r, std::size_t c) const noexcept;
  void mark_divergent(std::size_t r, std::size_t c, double rate);
  /// The values, or DivergentKernel when an entry diverges.
  const Matrix& finite() const;
};

/// CSV with a header row of column point indices; each row starts with its
/// point index. Divergent entries are written as DIV.
void write_gram_csv(const KernelMatrix& k, std::ostream& out);

}  // namespace sgntk
