#include <gtest/gtest.h>

#include <cmath>

#include "diffcal/error.hpp"
#include "diffcal/rng.hpp"
#include "diffcal/series.hpp"
#include "diffcal/trace.hpp"

namespace diffcal {
namespace {

TEST(Series, RangeHalfOpenAndInclusive) {
  TimeSeries s{10.0, 2.0, std::vector<double>(10, 1.0)};  // t = 10..28
  const IndexRange r = s.range(12.0, 16.0);
  EXPECT_EQ(r.first, 1u);
  EXPECT_EQ(r.last, 3u);
  EXPECT_EQ(s.range(12.0, 16.0, true).last, 4u);
  EXPECT_EQ(s.range(-100.0, 1000.0).size(), 10u);
  EXPECT_TRUE(s.range(40.0, 50.0).empty());
}

TEST(Series, CoversAndSlice) {
  TimeSeries s{0.0, 1.0, {0, 1, 2, 3, 4}};
  EXPECT_TRUE(s.covers(0.0, 4.0));
  EXPECT_FALSE(s.covers(0.0, 4.5));
  EXPECT_FALSE(s.covers(-0.5, 2.0));
  const TimeSeries sl = s.slice({2, 4});
  EXPECT_DOUBLE_EQ(sl.start, 2.0);
  ASSERT_EQ(sl.size(), 2u);
  EXPECT_DOUBLE_EQ(sl.values[1], 3.0);
  EXPECT_DOUBLE_EQ(s.mean({1, 4}), 2.0);
}

TEST(Series, MovingAverageTruncatesAtEdges) {
  const auto m = moving_average({1, 2, 3, 4, 5}, 3);
  ASSERT_EQ(m.size(), 5u);
  EXPECT_DOUBLE_EQ(m[0], 1.5);
  EXPECT_DOUBLE_EQ(m[2], 3.0);
  EXPECT_DOUBLE_EQ(m[4], 4.5);
}

TEST(Series, Statistics) {
  EXPECT_DOUBLE_EQ(mean_of({1, 2, 3}), 2.0);
  EXPECT_DOUBLE_EQ(stdev_of({1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(stdev_of({5}), 0.0);
  EXPECT_DOUBLE_EQ(median_of({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median_of({4, 1, 2, 3}), 2.5);
}

MultiChannelTrace small_trace() {
  MultiChannelTrace t;
  t.sample_period = 1.0;
  for (auto& ch : t.channels) ch = {1.0, 2.0, 3.0};
  t[Channel::fluid_R] = {0.5, 0.5, 0.5};
  return t;
}

TEST(Trace, DifferentialIsLeftMinusRight) {
  const auto d = small_trace().differential();
  EXPECT_DOUBLE_EQ(d.values[0], 0.5);
  EXPECT_DOUBLE_EQ(d.values[2], 2.5);
}

TEST(Trace, ValidateRejectsRaggedAndNonFinite) {
  auto t = small_trace();
  EXPECT_NO_THROW(t.validate());
  t[Channel::env].pop_back();
  EXPECT_THROW(t.validate(), Error);
  t = small_trace();
  t[Channel::air_1][1] = std::nan("");
  EXPECT_THROW(t.validate(), Error);
  t = small_trace();
  for (auto& ch : t.channels) ch.resize(1);
  EXPECT_THROW(t.validate(), Error);
}

TEST(Trace, ChannelNamesRoundTrip) {
  for (Channel c : kChannelOrder) {
    EXPECT_EQ(parse_channel(channel_name(c)), c);
  }
  EXPECT_FALSE(parse_channel("diff").has_value());
}

TEST(Rng, DeterministicPerSeedAndStream) {
  Rng a(42, 1), b(42, 1), c(42, 2);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    if (x != c.normal()) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, NormalMoments) {
  Rng r(7);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Error, CodeNamesAreDistinct) {
  EXPECT_EQ(code_name(ErrorCode::begin_tolerance), "protocol.begin_tolerance");
  EXPECT_NE(code_name(ErrorCode::ragged_row), code_name(ErrorCode::malformed_trace));
  EXPECT_THROW(require_finite(INFINITY, "x"), Error);
}

}  // namespace
}  // namespace diffcal
