// Counter-based random streams (Philox4x32-10).
//
// A stream is the pair (seed, stream_id); draw i of the stream is a pure
// function of (seed, stream_id, i), so replications can run on any thread in
// any order and still see identical numbers.
#pragma once

#include <array>
#include <cstdint>

namespace evt {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  /// Number of 64-bit draws consumed so far.
  std::uint64_t position() const { return draws_; }

  std::uint64_t next_u64();
  /// Uniform on (0, 1), never exactly 0 or 1: ((bits >> 11) + 0.5) * 2^-53.
  double next_uniform();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t draws_ = 0;
  PhiloxCounter block_{};
};

}  // namespace evt
