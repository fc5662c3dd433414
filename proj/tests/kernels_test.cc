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

#include "expmech/kernels.h"

#include <cmath>
#include <limits>
#include <vector>

#include "expmech/rng.h"
#include "gtest/gtest.h"

namespace expmech::kernels {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> RandomVector(std::size_t n, double spread,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = spread * (2.0 * rng.Uniform() - 1.0);
  return x;
}

TEST(LogSumExpTest, SmallCases) {
  const std::vector<double> two = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(LogSumExpSerial(two), std::log(2.0));
  EXPECT_EQ(LogSumExpSerial(std::vector<double>{}), -kInf);
  EXPECT_EQ(LogSumExpSerial(std::vector<double>{-kInf, -kInf}), -kInf);
  EXPECT_DOUBLE_EQ(LogSumExpSerial(std::vector<double>{-kInf, 1.5}), 1.5);
  EXPECT_EQ(LogSumExpSerial(std::vector<double>{kInf, 1.0}), kInf);
}

TEST(LogSumExpTest, NoOverflowAtLargeExponents) {
  const std::vector<double> x = {1000.0, 1000.0, 999.0};
  EXPECT_NEAR(LogSumExpSerial(x), 1000.0 + std::log(2.0 + std::exp(-1.0)),
              1e-12);
}

TEST(LogSumExpTest, MatchesDirectSum) {
  const auto x = RandomVector(100, 5.0, 1);
  double direct = 0.0;
  for (double v : x) direct += std::exp(v);
  EXPECT_NEAR(LogSumExpSerial(x), std::log(direct), 1e-12);
}

TEST(LogSumExpTest, ParallelMatchesSerial) {
  for (std::size_t n : {std::size_t{1}, std::size_t{63}, std::size_t{64},
                        std::size_t{1000}, kParallelThreshold * 3 + 7}) {
    const auto x = RandomVector(n, 40.0, n);
    const double serial = LogSumExpSerial(x);
    const double parallel = LogSumExpParallel(x);
    EXPECT_NEAR(parallel, serial, 1e-12 * std::abs(serial) + 1e-12) << n;
    // Fixed block layout: repeated calls agree bit for bit.
    EXPECT_EQ(LogSumExpParallel(x), parallel);
  }
}

TEST(LogSumExpTest, DispatcherAgrees) {
  const auto x = RandomVector(kParallelThreshold + 1, 10.0, 2);
  EXPECT_EQ(LogSumExp(x), LogSumExpParallel(x));
  const auto y = RandomVector(100, 10.0, 3);
  EXPECT_EQ(LogSumExp(y), LogSumExpSerial(y));
}

TEST(ShiftedWeightedSumTest, ParallelMatchesSerial) {
  const std::size_t n = kParallelThreshold * 2 + 3;
  const auto lw = RandomVector(n, 20.0, 4);
  const auto f = RandomVector(n, 1.0, 5);
  const double shift = LogSumExpSerial(lw);
  const double serial = ShiftedWeightedSumSerial(lw, f, shift);
  const double parallel = ShiftedWeightedSumParallel(lw, f, shift);
  EXPECT_NEAR(parallel, serial, 1e-12);
  EXPECT_EQ(ShiftedWeightedSum(lw, f, shift), parallel);
}

TEST(ShiftedWeightedSumTest, ExpectationOfConstant) {
  const auto lw = RandomVector(50, 3.0, 6);
  const std::vector<double> ones(50, 1.0);
  EXPECT_NEAR(ShiftedWeightedSumSerial(lw, ones, LogSumExpSerial(lw)), 1.0,
              1e-13);
}

}  // namespace
}  // namespace expmech::kernels
