#pragma once

#include <cstdint>
#include <string_view>

namespace sgntk {

/// Counter-based generator: output k of a stream with key K is
/// splitmix64_finalize(K + (k + 1) * 0x9E3779B97F4A7C15), i.e. SplitMix64
/// evaluated at an explicit position. Any draw is addressable without
/// generating its predecessors, so parallel fills are order-independent.
///
/// Sub-streams: stream(id).key = finalize(key + finalize(id + 0xD1B54A32D192ED03)).
/// Named sub-streams hash the name with 64-bit FNV-1a first. Network
/// parameters use seed -> "layer" -> l -> {"W","b"}, entry index as counter.
///
/// Normals use Box-Muller on the uniform pair (2j, 2j+1): draw 2j is
/// r*cos(t), draw 2j+1 is r*sin(t).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept;

  CounterRng stream(std::uint64_t id) const noexcept;
  CounterRng stream(std::string_view name) const noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const noexcept;
  double normal(std::uint64_t index) const noexcept;

  static std::uint64_t finalize(std::uint64_t z) noexcept;

 private:
  std::uint64_t key_;
};

/// Sequential view over a CounterRng's normal draws.
class NormalSequence {
 public:
  explicit NormalSequence(CounterRng rng, std::uint64_t start = 0) noexcept
      : rng_(rng), next_(start) {}
  double operator()() noexcept { return rng_.normal(next_++); }
  std::uint64_t position() const noexcept { return next_; }

 private:
  CounterRng rng_;
  std::uint64_t next_;
};

/// Seed of member k of a tagged family: CounterRng(root).stream(tag).stream(k).key().
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t k) noexcept;

}  // namespace sgntk
