#pragma once

#include <cstdint>
#include <random>

namespace bteb {

// 64-bit Mersenne Twister behind a seed-splitting constructor.
//
// Rng::stream(seed, index) gives statistically independent streams for
// distinct indices, so replication k draws the same numbers whether it runs
// alone, first, or on another thread.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed);
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform01();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace bteb
