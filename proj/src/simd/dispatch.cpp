#include <atomic>
#include <cstdlib>
#include <string_view>

#include "sgntk/errors.hpp"
#include "sgntk/simd.hpp"

namespace sgntk::simd {

namespace {

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("SGNTK_ISA"); env && std::string_view(env) == "scalar") {
    return Isa::Scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() noexcept {
  static const Isa isa = avx2::supported() ? Isa::Avx2 : Isa::Scalar;
  return isa;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2::supported()) raise(Errc::InvalidArgument, "AVX2/FMA not supported");
  active().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) raise(Errc::DimensionMismatch, "dot: length mismatch");
  return active_isa() == Isa::Avx2 ? avx2::dot(a.data(), b.data(), a.size())
                                   : scalar::dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) raise(Errc::DimensionMismatch, "axpy: length mismatch");
  if (active_isa() == Isa::Avx2) {
    avx2::axpy(alpha, x.data(), y.data(), x.size());
  } else {
    scalar::axpy(alpha, x.data(), y.data(), x.size());
  }
}

}  // namespace sgntk::simd
