#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace uwb {

/// SplitMix64 finalizer; used to derive independent substream keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic random stream owned by a single simulation context.
///
/// Substreams are keyed by (seed, path...), so the draws of e.g. trial k do
/// not depend on how many other trials run or in which order.
class RandomStream {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Substream addressed by a path of counters below the master seed.
  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean, double sigma) {
    return std::normal_distribution<double>(mean, sigma)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

// Substream domains.
enum class Stream : std::uint64_t {
  Sync = 1,
  Broadcast = 2,
  TagReceive = 3,
  Trial = 4,
  Layout = 5,
  Clocks = 6,
};

}  // namespace uwb
