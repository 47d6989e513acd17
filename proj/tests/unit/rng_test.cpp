#include "swarmsim/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace swarmsim;

// Known-answer vectors published with the Random123 reference code.
TEST(Philox, KnownAnswerZero) {
  const PhiloxCounter out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const PhiloxCounter out =
      philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const PhiloxCounter out =
      philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RngStream, FirstWordsFollowDocumentedLayout) {
  RngStream s(0, 0);
  const PhiloxCounter block0 = philox4x32_10({0, 0, 0, 0}, {0, 0});
  const std::uint64_t w0 = (std::uint64_t{block0[1]} << 32) | block0[0];
  const std::uint64_t w1 = (std::uint64_t{block0[3]} << 32) | block0[2];
  EXPECT_EQ(s.next_u64(), w0);
  EXPECT_EQ(s.next_u64(), w1);
  const PhiloxCounter block1 = philox4x32_10({1, 0, 0, 0}, {0, 0});
  EXPECT_EQ(s.next_u64(), (std::uint64_t{block1[1]} << 32) | block1[0]);
}

TEST(RngStream, SameSeedAndStreamRepeat) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.normal(), b.normal());
  }
}

TEST(RngStream, StreamsDiffer) {
  RngStream a(42, 7), b(42, 8), c(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    seen.insert(a.next_u64());
    seen.insert(b.next_u64());
    seen.insert(c.next_u64());
  }
  EXPECT_EQ(seen.size(), 300u);
}

TEST(RngStream, UniformInUnitInterval) {
  RngStream s(5, 1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(RngStream, NormalMoments) {
  RngStream s(9, 3);
  const int n = 200000;
  double sum = 0.0, sq = 0.0, quart = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sq += x * x;
    quart += x * x * x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.015);
  EXPECT_NEAR(quart / n, 3.0, 0.06);
}

TEST(RngStream, SensorStreamIds) {
  EXPECT_EQ(sensor_stream_id(0, 0), 0u);
  EXPECT_EQ(sensor_stream_id(2, 5), 133u);
  EXPECT_NE(sensor_stream_id(1, 0), sensor_stream_id(0, 1));
}
