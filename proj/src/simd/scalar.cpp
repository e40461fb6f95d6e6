#include <cmath>

#include "sgntk/simd.hpp"

namespace sgntk::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double lane[16] = {};
  const std::size_t blocked = n - n % 16;
  for (std::size_t i = 0; i < blocked; i += 16) {
    for (std::size_t k = 0; k < 16; ++k) lane[k] = std::fma(a[i + k], b[i + k], lane[k]);
  }
  double s[4];
  for (std::size_t k = 0; k < 4; ++k) s[k] = (lane[k] + lane[4 + k]) + (lane[8 + k] + lane[12 + k]);
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (std::size_t i = blocked; i < n; ++i) total = std::fma(a[i], b[i], total);
  return total;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

}  // namespace sgntk::simd::scalar
