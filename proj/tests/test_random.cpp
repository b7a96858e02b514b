#include "ddgate/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace ddgate {
namespace {

// Known-answer vectors published with Random123 (kat_vectors, philox4x32_10).
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, PureFunctionOfCounter) {
  const CounterRng a(123), b(123), c(124);
  EXPECT_EQ(a.normal(17, 3), b.normal(17, 3));
  EXPECT_NE(a.normal(17, 3), c.normal(17, 3));
  EXPECT_NE(a.normal(17, 3), a.normal(17, 4));
  // Evaluation order does not matter.
  const double late = a.normal(1000, 0);
  (void)a.normal(0, 0);
  EXPECT_EQ(late, b.normal(1000, 0));
}

TEST(CounterRng, UniformsInOpenInterval) {
  const CounterRng rng(9);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const double u = rng.uniform(i, 1);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(CounterRng, NormalMoments) {
  const CounterRng rng(2024);
  const int n = 400000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.normal(static_cast<std::uint64_t>(i), 0);
    s1 += g;
    s2 += g * g;
    s4 += g * g * g * g;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(s4 / n, 3.0, 0.05);
}

TEST(DeriveKey, DistinctTagsGiveDistinctKeys) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) keys.insert(derive_key(7, {a, b}));
  EXPECT_EQ(keys.size(), 400u);
  EXPECT_EQ(derive_key(7, {1, 2}), derive_key(7, {1, 2}));
  EXPECT_NE(derive_key(7, {1, 2}), derive_key(7, {2, 1}));
  EXPECT_EQ(hash_string("xy8"), hash_string("xy8"));
}

}  // namespace
}  // namespace ddgate
