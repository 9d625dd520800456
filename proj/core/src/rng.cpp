#include "nmsse/rng.hpp"

#include <random>

namespace nmsse {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                       std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMulA, ctr[0], hi0, lo0);
    mulhilo(kMulB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t trajectory_index)
    : seed_(master_seed), index_(trajectory_index) {}

void RngStream::refill() {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = philox4x32_10(counter, key);
  ++block_;
  cursor_ = 0;
}

RngStream::result_type RngStream::operator()() {
  if (cursor_ >= 2) refill();
  const std::uint64_t lo = buffer_[2 * cursor_];
  const std::uint64_t hi = buffer_[2 * cursor_ + 1];
  ++cursor_;
  return (hi << 32) | lo;
}

double normal(RngStream& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  return dist(rng);
}

double uniform(RngStream& rng) {
  // 53 random mantissa bits
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace nmsse
