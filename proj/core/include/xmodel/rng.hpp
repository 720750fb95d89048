#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace xmodel {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent key from a master seed and up to two indices
/// (stream id, replication index, ...).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return mix64(mix64(master ^ 0x6A09E667F3BCC909ULL) + mix64(a + 0x3C6EF372FE94F82BULL) * 3 +
               mix64(b + 0xA54FF53A5F1D36F1ULL));
}

/// Counter-based generator: the i-th output is mix64(key + i * golden).
/// Any draw can be reproduced from (key, counter) alone, so per-stream
/// generators are independent of the order in which other streams are used.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key = 0) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Unit-rate exponential.
  double exponential() noexcept { return -std::log1p(-uniform()); }

  /// Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound;
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace xmodel
