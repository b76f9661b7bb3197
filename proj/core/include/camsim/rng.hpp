#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace camsim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Folds a tuple of integers into one stream key. Order matters.
constexpr std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC909ull;
  for (auto p : parts) h = mix64(h ^ mix64(p));
  return h;
}

/// Counter-based generator: output i is a pure function of (key, i), so a
/// stream keyed by e.g. (seed, row, col) is independent of evaluation order.
/// Satisfies UniformRandomBitGenerator so std distributions can draw from it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  CounterRng(std::initializer_list<std::uint64_t> parts) noexcept
      : key_(stream_key(parts)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return mix64(key_ ^ mix64(++counter_ * 0xD1B54A32D192ED03ull));
  }

  /// Uniform double in [0, 1).
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace camsim
