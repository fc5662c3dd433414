// Copyright 2026 The expmech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "expmech/rng.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "expmech/mechanism.h"
#include "expmech/valuation.h"
#include "gtest/gtest.h"

namespace expmech {
namespace {

TEST(RngTest, GoldenRawSequences) {
  Rng a(1);
  EXPECT_EQ(a.NextU64(), 0x2245bd5fbb686f68ULL);
  EXPECT_EQ(a.NextU64(), 0x22eb92502318fa4eULL);
  EXPECT_EQ(a.NextU64(), 0x7382d1e77ae6459aULL);
  Rng b(20260101);
  EXPECT_EQ(b.NextU64(), 0x2f795e3c56257e8aULL);
  EXPECT_EQ(b.NextU64(), 0x562097f127e50addULL);
  EXPECT_EQ(b.NextU64(), 0xd25ce7272b9235aaULL);
}

TEST(RngTest, GoldenStream) {
  Rng s = Rng::Stream(7, 3);
  EXPECT_EQ(s.Uniform(), 0x1.9b24b1a332c67p-1);
  EXPECT_EQ(s.Uniform(), 0x1.2a53786d892a9p-1);
}

// Draw sequences of SampleOutcome recorded from the first correct run.
TEST(RngTest, GoldenOutcomeDraws) {
  const auto profile = ValuationProfile::FromRows(
      {{0.1, 0.7, 0.3, 0.9}, {0.5, 0.2, 0.8, 0.4}});
  const OutcomeDistribution dist =
      GibbsDistribution(profile, PrivacyParams{1.0, 0.0, 0.0});
  const std::vector<int> want11 = {0, 3, 1, 2, 0, 1, 3, 2, 2, 3, 1, 0};
  const std::vector<int> want12 = {0, 2, 0, 2, 3, 2, 1, 0, 3, 0, 2, 3};
  Rng r11(11);
  Rng r12(12);
  for (std::size_t i = 0; i < want11.size(); ++i) {
    EXPECT_EQ(SampleOutcome(dist, r11), want11[i]) << "draw " << i;
    EXPECT_EQ(SampleOutcome(dist, r12), want12[i]) << "draw " << i;
  }
}

TEST(RngTest, UniformRanges) {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double o = rng.UniformOpen();
    ASSERT_GT(o, 0.0);
    ASSERT_LT(o, 1.0);
  }
}

TEST(RngTest, BelowIsUnbiasedOnSmallBound) {
  Rng rng(5);
  std::vector<int> counts(3, 0);
  constexpr int kDraws = 300000;
  for (int i = 0; i < kDraws; ++i) {
    const auto x = rng.Below(3);
    ASSERT_LT(x, 3u);
    ++counts[x];
  }
  for (int c : counts) EXPECT_NEAR(c / double(kDraws), 1.0 / 3.0, 0.005);
}

TEST(RngTest, StreamsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    first.insert(Rng::Stream(42, i).NextU64());
  }
  EXPECT_EQ(first.size(), 1000u);
  EXPECT_NE(Rng::Stream(1, 0).NextU64(), Rng::Stream(2, 0).NextU64());
}

TEST(RngTest, ExponentialMean) {
  Rng rng(9);
  double sum = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) sum += rng.Exponential();
  EXPECT_NEAR(sum / kDraws, 1.0, 3.0 * 1.0 / std::sqrt(double(kDraws)));
}

}  // namespace
}  // namespace expmech
