#pragma once

#include <cstdint>
#include <vector>

namespace shiftlab {

// Counter-based generator (splitmix64 output function). Draws depend only on
// (key, counter), and fork() derives an independent keyed stream, so work
// split across blocks or retries reproduces byte-identically no matter how
// many draws other streams consumed. std::* distributions are avoided on
// purpose: their output is not pinned across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + (++counter_) * kGamma); }

  // Uniform in [0,1) with 53 random bits.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Multiply-shift; bias is O(n/2^64).
  std::uint64_t next_below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Index sampled proportionally to nonnegative weights (inverse CDF).
  std::size_t sample(const std::vector<double>& weights) noexcept {
    double total = 0;
    for (double w : weights) total += w;
    double u = next_unit() * total;
    double acc = 0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  Rng fork(std::uint64_t stream) const noexcept {
    return Rng(mix(key_ ^ mix(stream + kGamma)));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace shiftlab
