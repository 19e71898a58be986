#pragma once

#include <array>
#include <cstdint>

namespace imsm {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Pure: maps (counter, key) to four 32-bit words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                         std::array<std::uint32_t, 2> key);

/// Counter-based random stream. The 64-bit seed is the Philox key, the
/// stream id occupies the upper half of the counter and the block index the
/// lower half, so distinct (seed, stream_id) pairs never share a block and a
/// stream's sequence does not depend on which thread consumes it.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t blocks_consumed() const { return block_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1); 53 random bits.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on (lo, hi].
  double uniform_left_open(double lo, double hi) {
    // 1 - u is uniform on (0, 1) as well, so lo + (hi - lo) * (1 - u) never
    // returns lo; hi is reached only through rounding.
    return hi - (hi - lo) * uniform();
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace imsm
