#pragma once

// Counter-based random streams.
//
// Every stream is a Philox4x32-10 keyed by the run seed, with the stream id in the
// upper half of the counter. Two streams with the same (seed, stream_id) produce the
// same sequence; distinct ids address disjoint counter ranges, so replications can be
// handed to any worker in any order.

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <array>
#include <cstdint>
#include <limits>

#include "sbm/core/error.hpp"

namespace sbm::num {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block encrypt(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Mixes a 64-bit value (splitmix64 finalizer). Used to derive sub-seeds such as one per grid size.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag));
}

/// A UniformRandomBitGenerator over 64-bit words.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (cursor_ == 2) refill();
    const std::size_t i = 2 * cursor_++;
    return (std::uint64_t{block_[i]} << 32) | block_[i + 1];
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill() {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(counter_),
                                static_cast<std::uint32_t>(counter_ >> 32),
                                static_cast<std::uint32_t>(stream_id_),
                                static_cast<std::uint32_t>(stream_id_ >> 32)};
    block_ = Philox4x32::encrypt(ctr, {static_cast<std::uint32_t>(seed_),
                                       static_cast<std::uint32_t>(seed_ >> 32)});
    ++counter_;
    cursor_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  Philox4x32::Block block_{};
  std::size_t cursor_ = 2;
};

inline double draw_gaussian(RngStream& stream) {
  return boost::random::normal_distribution<double>{}(stream);
}

/// Exponential with the given rate (mean 1/rate).
inline double draw_exponential(RngStream& stream, double rate) {
  if (!(rate > 0.0)) throw DomainError("draw_exponential: rate must be positive");
  return boost::random::exponential_distribution<double>{rate}(stream);
}

}  // namespace sbm::num
