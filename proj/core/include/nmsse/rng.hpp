#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace nmsse {

// Philox4x32-10 (Salmon et al. 2011) keyed by the master seed. The 128-bit
// counter is (block_lo, block_hi, index_lo, index_hi), so streams with different
// trajectory indices never share a counter value.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t trajectory_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t trajectory_index() const noexcept { return index_; }
  std::uint64_t blocks_consumed() const noexcept { return block_; }

  // Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                                     std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned cursor_ = 2;
};

// Standard normal draw with the given standard deviation.
double normal(RngStream& rng, double stddev);
// Uniform draw in [0, 1).
double uniform(RngStream& rng);

}  // namespace nmsse
