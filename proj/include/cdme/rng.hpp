#pragma once

#include <array>
#include <cstdint>

namespace cdme {

/// Counter-based generator (Philox4x32-10). A stream is fully determined
/// by (seed, stream id), so parallel replicas draw from independent,
/// reproducible sequences without any coordination.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform on (0, 1]; safe to pass to log().
  double uniform_open();

  /// Standard normal (Box-Muller, pairs cached).
  double normal();

  /// Exponential with the given rate; +infinity when rate <= 0.
  double exponential(double rate);

 private:
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;

  void refill();
};

}  // namespace cdme
