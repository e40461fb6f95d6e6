#include "sgntk/rng.hpp"

#include <cmath>
#include <numbers>

namespace sgntk {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}
}  // namespace

CounterRng::CounterRng(std::uint64_t seed) noexcept : key_(finalize(seed)) {}

std::uint64_t CounterRng::finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng CounterRng::stream(std::uint64_t id) const noexcept {
  CounterRng child(0);
  child.key_ = finalize(key_ + finalize(id + kStreamSalt));
  return child;
}

CounterRng CounterRng::stream(std::string_view name) const noexcept { return stream(fnv1a(name)); }

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  return finalize(key_ + (counter + 1) * kGamma);
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const noexcept {
  const std::uint64_t pair = index / 2;
  const double u1 = uniform(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index % 2 == 0) ? r * std::cos(angle) : r * std::sin(angle);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t k) noexcept {
  return CounterRng(root).stream(tag).stream(k).key();
}

}  // namespace sgntk
