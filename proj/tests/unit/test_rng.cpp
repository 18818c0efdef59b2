#include <gtest/gtest.h>

#include <cmath>

#include "sca/rng.hpp"

using namespace sca;

// Known-answer vectors published with Random123.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, PureFunctionOfCounter) {
  const CounterRng a(42), b(42), c(43);
  EXPECT_EQ(a.uniform(7, 3, Stream::kVertexUpdate), b.uniform(7, 3, Stream::kVertexUpdate));
  EXPECT_NE(a.uniform(7, 3, Stream::kVertexUpdate), c.uniform(7, 3, Stream::kVertexUpdate));
  EXPECT_NE(a.uniform(7, 3, Stream::kVertexUpdate), a.uniform(7, 4, Stream::kVertexUpdate));
  EXPECT_NE(a.uniform(7, 3, Stream::kVertexUpdate), a.uniform(7, 3, Stream::kGlauber));
}

TEST(CounterRng, OpenUnitIntervalAndMoments) {
  const CounterRng rng(1);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [u, v] = rng.uniforms(static_cast<std::uint64_t>(i), 0, Stream::kVertexUpdate);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sumsq / n - mean * mean, 1.0 / 12.0, 2e-3);
  EXPECT_GT(to_open_unit(0), 0.0);
  EXPECT_LT(to_open_unit(~std::uint64_t{0}), 1.0);
}
