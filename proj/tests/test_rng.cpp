#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "imsm/rng.hpp"

namespace {

using imsm::philox4x32;
using imsm::RngStream;

// Published Philox4x32-10 known-answer vectors.
TEST(Philox, KnownAnswerZero) {
  const auto r = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r[0], 0x6627e8d5u);
  EXPECT_EQ(r[1], 0xe169c58du);
  EXPECT_EQ(r[2], 0xbc57ac4cu);
  EXPECT_EQ(r[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto r = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(r[0], 0x408f276du);
  EXPECT_EQ(r[1], 0x41c83b0eu);
  EXPECT_EQ(r[2], 0xa20bc7c6u);
  EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto r = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(r[0], 0xd16cfe09u);
  EXPECT_EQ(r[1], 0x94fdccebu);
  EXPECT_EQ(r[2], 0x5001e420u);
  EXPECT_EQ(r[3], 0x24126ea1u);
}

TEST(RngStream, SameSeedAndStreamReplays) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, StreamsAndSeedsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    for (std::uint64_t stream = 0; stream < 8; ++stream) {
      RngStream r(seed, stream);
      firsts.insert(r.next_u64());
    }
  }
  EXPECT_EQ(firsts.size(), 64u);
}

TEST(RngStream, UniformStaysInOpenUnitInterval) {
  RngStream r(1, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_LT(lo, 1e-4);
  EXPECT_GT(hi, 1.0 - 1e-4);
  // Mean of n uniforms has sd 1/sqrt(12 n).
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(RngStream, LeftOpenIntervalExcludesLowerEnd) {
  RngStream r(3, 3);
  for (int i = 0; i < 100000; ++i) {
    const double v = r.uniform_left_open(-2.0, 1.0);
    ASSERT_GT(v, -2.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(RngStream, CountsConsumedBlocks) {
  RngStream r(0, 0);
  EXPECT_EQ(r.blocks_consumed(), 0u);
  r.next_u64();
  r.next_u64();
  EXPECT_EQ(r.blocks_consumed(), 1u);
  r.next_u64();
  EXPECT_EQ(r.blocks_consumed(), 2u);
}

}  // namespace
