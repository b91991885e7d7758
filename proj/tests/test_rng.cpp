#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rfim/rng.hpp"

using namespace rfim;

TEST(Philox, KnownAnswerZero) {
  const Block out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const Block out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const Block out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(CounterRng, PureFunctionOfSeedStreamIndex) {
  const CounterRng a(7, stream_id(StreamKind::glauber, 3));
  const CounterRng b(7, stream_id(StreamKind::glauber, 3));
  for (std::uint64_t i = 0; i < 100; ++i) {
    EXPECT_EQ(a.uniform(i), b.uniform(i));
    EXPECT_EQ(a.uniform2(i), b.uniform2(i));
  }
  const CounterRng c(7, stream_id(StreamKind::trace, 3));
  EXPECT_NE(a.uniform(0), c.uniform(0));
}

TEST(CounterRng, UniformsInsideOpenInterval) {
  EXPECT_GT(to_unit_open(0), 0.0);
  EXPECT_LT(to_unit_open(~std::uint64_t{0}), 1.0);
  const CounterRng r(1, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform(static_cast<std::uint64_t>(i));
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(StreamId, KindInTopBits) {
  EXPECT_EQ(stream_id(StreamKind::field, 5) >> 48, static_cast<std::uint64_t>(StreamKind::field));
  EXPECT_EQ(stream_id(StreamKind::field, 5) & 0xFFFF, 5u);
}

TEST(RngStream, NormalMoments) {
  RngStream s(3, 0);
  const int n = 200000;
  double m = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m += z;
    m2 += z * z;
  }
  m /= n;
  m2 /= n;
  EXPECT_NEAR(m, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(RngStream, BelowIsInRangeAndCoversValues) {
  RngStream s(11, 2);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = s.below(7);
    ASSERT_LT(x, 7u);
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(DeriveSeed, DistinctChildren) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t c = 0; c < 1000; ++c) seeds.insert(derive_seed(42, c));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 9), derive_seed(42, 9));
}
