#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace uncertainty {

/// Seedable stream built on std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. The seed is whitened with splitmix64 first, and split()
/// derives an independent child stream from (seed, stream id). Conversions to
/// uniform and normal deviates are done here rather than by <random>
/// distributions, whose algorithms are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  RandomStream split(std::uint64_t stream_id) const;

  std::uint64_t next_u64() { return engine_(); }
  /// [0, 1) with 53 random bits
  double uniform();
  /// (0, 1]
  double uniform_open_zero();
  /// Two independent standard normal deviates (Box-Muller).
  std::pair<double, double> normal_pair();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace uncertainty
