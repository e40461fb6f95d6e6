#pragma once

#include <cstddef>
#include <span>

// Dense inner-loop kernels with a scalar reference and an AVX2 variant picked
// at runtime. Both variants use the same summation order and fused
// multiply-adds, so they agree bit for bit.
//
// dot() order: indices [0, 16*floor(n/16)) accumulate into 16 lanes
// (lane = i mod 16). Lanes reduce as s[k] = (l[k] + l[4+k]) + (l[8+k] + l[12+k])
// for k < 4, then (s[0] + s[1]) + (s[2] + s[3]). Remaining indices are folded
// in sequentially with fma.
namespace sgntk::simd {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa) noexcept;

/// Best instruction set this CPU supports.
Isa detected_isa() noexcept;

/// Instruction set currently used by dot()/axpy(). Defaults to detected_isa();
/// the SGNTK_ISA=scalar environment variable forces the reference path.
Isa active_isa() noexcept;

/// Throws InvalidArgument when the CPU lacks the requested set.
void set_active_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
}  // namespace scalar

namespace avx2 {
bool supported() noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
}  // namespace avx2

}  // namespace sgntk::simd
