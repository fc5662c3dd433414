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

#include "expmech/permanent.h"

#include <cmath>
#include <limits>
#include <vector>

#include "expmech/error.h"
#include "expmech/rng.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace expmech {
namespace {

oracle::Table RandomLinear(int n, double lo, double hi, Rng& rng) {
  oracle::Table a(n, std::vector<double>(n));
  for (auto& row : a) {
    for (double& x : row) x = lo + (hi - lo) * rng.Uniform();
  }
  return a;
}

WeightMatrix ToMatrix(const oracle::Table& a) {
  std::vector<double> flat;
  for (const auto& row : a) flat.insert(flat.end(), row.begin(), row.end());
  return WeightMatrix::FromLinear(static_cast<int>(a.size()), flat);
}

TEST(PermanentTest, AllOnesAndIdentity) {
  const WeightMatrix ones(3, std::vector<double>(9, 0.0));
  EXPECT_EQ(std::exp(LogPermanent(ones)), 6.0);
  EXPECT_NEAR(LogPermanent(ones), std::log(6.0), 1e-15);
  const WeightMatrix id = ToMatrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  EXPECT_EQ(LogPermanent(id), 0.0);
}

TEST(PermanentTest, EmptyAndZeroRow) {
  EXPECT_EQ(LogPermanent(WeightMatrix(0, {})), 0.0);
  const WeightMatrix z = ToMatrix({{0, 0}, {1, 1}});
  EXPECT_EQ(LogPermanent(z), -std::numeric_limits<double>::infinity());
}

TEST(PermanentTest, RyserMatchesEnumeration) {
  Rng rng(1);
  for (int n : {5, 6}) {
    for (int trial = 0; trial < 10; ++trial) {
      // Entries in [1, e^{eps/2}] with eps = 2.
      const auto a = RandomLinear(n, 1.0, std::exp(1.0), rng);
      const double want = oracle::Permanent(a);
      const double got = std::exp(LogPermanent(ToMatrix(a)));
      EXPECT_LE(std::abs(got - want) / want, 1e-10) << n;
      EXPECT_LE(std::abs(std::exp(LogPermanentRyserSerial(ToMatrix(a))) - want) /
                    want,
                1e-12);
    }
  }
}

TEST(PermanentTest, EnumerationWithZeros) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = RandomLinear(5, 0.0, 1.0, rng);
    for (auto& row : a) {
      for (double& x : row) {
        if (rng.Uniform() < 0.4) x = 0.0;
      }
    }
    const double want = oracle::Permanent(a);
    const double got = LogPermanent(ToMatrix(a));
    if (want == 0.0) {
      EXPECT_EQ(got, -std::numeric_limits<double>::infinity());
    } else {
      EXPECT_NEAR(std::exp(got), want, 1e-10 * want);
    }
  }
}

TEST(PermanentTest, SerialParallelAndDpAgree) {
  Rng rng(3);
  for (int n : {1, 2, 7, 10, 12, 14}) {
    const auto a = RandomLinear(n, 1.0, std::exp(2.0), rng);
    const WeightMatrix m = ToMatrix(a);
    const double serial = LogPermanentRyserSerial(m);
    const double parallel = LogPermanentRyserParallel(m);
    const double dp = LogPermanentSubsetDp(m);
    EXPECT_NEAR(parallel, serial, 1e-12) << n;
    EXPECT_NEAR(dp, serial, 1e-12) << n;
    EXPECT_EQ(LogPermanentRyserParallel(m), parallel);
  }
}

TEST(PermanentTest, LargeLogEntries) {
  // exp(600) entries overflow in linear scale but not in the log domain.
  const int n = 4;
  std::vector<double> log_entries(n * n, 600.0);
  const WeightMatrix m(n, log_entries);
  EXPECT_NEAR(LogPermanent(m), 4 * 600.0 + std::log(24.0), 1e-10);
}

TEST(PermanentTest, CancellationFallsBackToDp) {
  // Rows with wildly different column weights: Ryser's signed terms cancel
  // heavily; the result must still match the DP.
  std::vector<double> log_entries;
  const int n = 9;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) log_entries.push_back(j == i ? 0.0 : -30.0);
  }
  const WeightMatrix m(n, log_entries);
  const RyserDiagnostics diag = RyserWithDiagnostics(m, false);
  EXPECT_GT(diag.cancellation, 1.0);
  EXPECT_NEAR(LogPermanent(m), LogPermanentSubsetDp(m), 1e-12);
}

TEST(PermanentTest, CapEnforced) {
  const WeightMatrix big(kMaxPermanentOrder + 1,
                         std::vector<double>((kMaxPermanentOrder + 1) *
                                                 (kMaxPermanentOrder + 1),
                                             0.0));
  EXPECT_THROW(LogPermanent(big), CapExceeded);
}

TEST(WeightMatrixTest, Validation) {
  EXPECT_THROW(WeightMatrix(2, {0.0, 0.0, 0.0}), InputError);
  EXPECT_THROW(WeightMatrix(1, {std::numeric_limits<double>::quiet_NaN()}),
               InputError);
  EXPECT_THROW(WeightMatrix(1, {std::numeric_limits<double>::infinity()}),
               InputError);
  const std::vector<double> neg = {-1.0};
  EXPECT_THROW(WeightMatrix::FromLinear(1, neg), InputError);
}

TEST(WeightMatrixTest, Minors) {
  const WeightMatrix m = ToMatrix({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  const WeightMatrix minor = m.WithoutRowCol(1, 0);
  ASSERT_EQ(minor.order(), 2);
  EXPECT_NEAR(std::exp(minor.log_entry(0, 0)), 2.0, 1e-15);
  EXPECT_NEAR(std::exp(minor.log_entry(1, 1)), 9.0, 1e-14);
  const std::vector<int> rows = {0, 2};
  const std::vector<int> cols = {1, 2};
  const WeightMatrix sub = m.Submatrix(rows, cols);
  EXPECT_NEAR(std::exp(LogPermanent(sub)), 2 * 9 + 3 * 8, 1e-12);
}

TEST(EstimatorTest, ExactIsIdentical) {
  Rng rng(4);
  const WeightMatrix m = ToMatrix(RandomLinear(6, 1.0, 2.0, rng));
  ExactPermanentEstimator exact;
  EXPECT_EQ(exact.LogPermanent(m, 0.1, 0.01, rng), LogPermanent(m));
  EXPECT_TRUE(exact.is_exact());
}

TEST(EstimatorTest, NoisyWithinAccuracy) {
  Rng rng(5);
  const WeightMatrix m = ToMatrix(RandomLinear(5, 1.0, 2.0, rng));
  const double truth = LogPermanent(m);
  NoisyPermanentEstimator noisy;
  double lo = 1.0;
  double hi = -1.0;
  for (int i = 0; i < 10000; ++i) {
    const double d = noisy.LogPermanent(m, 0.1, 0.01, rng) - truth;
    ASSERT_LE(std::abs(d), 0.1);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  EXPECT_LT(lo, -0.09);
  EXPECT_GT(hi, 0.09);
}

TEST(EstimatorTest, Parse) {
  EXPECT_TRUE(ParseEstimator("exact").estimator->is_exact());
  const EstimatorSpec noisy = ParseEstimator("noisy:0.1");
  EXPECT_FALSE(noisy.estimator->is_exact());
  EXPECT_DOUBLE_EQ(*noisy.gamma, 0.1);
  EXPECT_THROW(ParseEstimator("noisy:"), InputError);
  EXPECT_THROW(ParseEstimator("noisy:-1"), InputError);
  EXPECT_THROW(ParseEstimator("mcmc"), InputError);
}

}  // namespace
}  // namespace expmech
