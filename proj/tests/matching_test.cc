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

#include "expmech/matching.h"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "expmech/error.h"
#include "expmech/mechanism.h"
#include "expmech/rng.h"
#include "expmech/verification.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace expmech {
namespace {

PrivacyParams Eps(double e, double gamma = 0.0) {
  return PrivacyParams{e, 0.0, gamma};
}

MatchingInstance RandomInstance(int n, Rng& rng) {
  std::vector<double> v(n * n);
  for (double& x : v) x = rng.Uniform();
  return MatchingInstance(n, v);
}

oracle::Table Rows(const MatchingInstance& m) {
  oracle::Table t(m.size());
  for (int i = 0; i < m.size(); ++i) t[i].assign(m.row(i).begin(), m.row(i).end());
  return t;
}

// Gibbs law over EnumerateAssignments order by direct summation.
std::vector<double> BruteForceLaw(const MatchingInstance& m, double eps) {
  const auto perms = EnumerateAssignments(m.size());
  std::vector<double> w;
  double z = 0.0;
  for (const auto& a : perms) {
    w.push_back(std::exp(eps / 2.0 * m.Welfare(a)));
    z += w.back();
  }
  for (double& x : w) x /= z;
  return w;
}

double ChiSquarePValue(double stat, int df) {
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

TEST(MatchingInstanceTest, Validation) {
  EXPECT_THROW(MatchingInstance(2, {0.1, 0.2, 0.3}), InputError);
  EXPECT_THROW(MatchingInstance(1, {1.5}), InputError);
  EXPECT_THROW(MatchingInstance(kMaxPermanentOrder + 1,
                                std::vector<double>(21 * 21, 0.0)),
               CapExceeded);
}

TEST(MatchingInstanceTest, PaddedWithDummies) {
  const auto wide = MatchingInstance::Padded({{0.5, 0.2, 0.9}});
  EXPECT_EQ(wide.size(), 3);
  EXPECT_DOUBLE_EQ(wide.value(0, 2), 0.9);
  EXPECT_DOUBLE_EQ(wide.value(2, 1), 0.0);
  const auto tall = MatchingInstance::Padded({{0.5}, {0.7}});
  EXPECT_EQ(tall.size(), 2);
  EXPECT_DOUBLE_EQ(tall.value(1, 0), 0.7);
  EXPECT_DOUBLE_EQ(tall.value(1, 1), 0.0);
}

TEST(EnumerateAssignmentsTest, LexicographicPermutations) {
  const auto perms = EnumerateAssignments(4);
  ASSERT_EQ(perms.size(), 24u);
  EXPECT_EQ(perms.front(), (Assignment{0, 1, 2, 3}));
  EXPECT_EQ(perms.back(), (Assignment{3, 2, 1, 0}));
  for (std::size_t k = 1; k < perms.size(); ++k) EXPECT_LT(perms[k - 1], perms[k]);
}

TEST(MatchingPartitionTest, EqualsExplicitRange) {
  Rng rng(1);
  for (int n = 1; n <= 5; ++n) {
    const auto m = RandomInstance(n, rng);
    const ValuationProfile explicit_profile = ToExplicitProfile(m);
    EXPECT_NEAR(LogMatchingPartition(m, Eps(2.0)),
                LogPartition(explicit_profile, Eps(2.0)), 1e-12);
    const auto a = Rows(m);
    oracle::Table weights = a;
    for (auto& row : weights) {
      for (double& x : row) x = std::exp(x);
    }
    EXPECT_NEAR(LogMatchingPartition(m, Eps(2.0)),
                std::log(oracle::Permanent(weights)), 1e-12);
  }
}

TEST(MatchingPartitionTest, MarginalsWelfareEntropy) {
  Rng rng(2);
  const auto m = RandomInstance(4, rng);
  const auto law = BruteForceLaw(m, 3.0);
  const auto perms = EnumerateAssignments(4);
  std::vector<double> want(16, 0.0);
  double welfare = 0.0;
  for (std::size_t k = 0; k < perms.size(); ++k) {
    for (int i = 0; i < 4; ++i) want[i * 4 + perms[k][i]] += law[k];
    welfare += law[k] * m.Welfare(perms[k]);
  }
  const auto marginals = AssignmentMarginals(m, Eps(3.0));
  for (int k = 0; k < 16; ++k) EXPECT_NEAR(marginals[k], want[k], 1e-12);
  EXPECT_NEAR(ExpectedMatchingWelfare(m, Eps(3.0)), welfare, 1e-12);
  EXPECT_NEAR(MatchingEntropy(m, Eps(3.0)), oracle::Entropy(law), 1e-12);
}

TEST(SequentialLawTest, TwoByTwoClosedForm) {
  const auto m = MatchingInstance::FromRows({{1, 0}, {0, 1}});
  ExactPermanentEstimator exact;
  Rng rng(3);
  const auto law = SequentialLaw(m, Eps(2.0), exact, rng);
  const double e2 = std::exp(2.0);
  EXPECT_NEAR(law[0], e2 / (e2 + 1.0), 1e-15);
  EXPECT_NEAR(law[0], 0.8808, 1e-4);
}

TEST(SequentialLawTest, EqualValuesAreUniform) {
  const auto m = MatchingInstance::FromRows(
      {{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}});
  ExactPermanentEstimator exact;
  Rng rng(4);
  for (double p : SequentialLaw(m, Eps(5.0), exact, rng)) {
    EXPECT_NEAR(p, 1.0 / 6.0, 1e-15);
  }
}

TEST(SequentialLawTest, ExactBackendEqualsGibbs) {
  Rng rng(5);
  ExactPermanentEstimator exact;
  for (int n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto m = RandomInstance(n, rng);
      const auto law = SequentialLaw(m, Eps(2.5), exact, rng);
      const auto want = BruteForceLaw(m, 2.5);
      // Telescoping: the product of stage marginals is the Gibbs mass.
      for (std::size_t k = 0; k < want.size(); ++k) {
        EXPECT_NEAR(law[k], want[k], 1e-9);
      }
    }
  }
}

TEST(SequentialLawTest, NoisyBackendWithinDistortion) {
  Rng rng(6);
  NoisyPermanentEstimator noisy;
  const double gamma = 0.1;
  for (int n = 2; n <= 5; ++n) {
    const auto m = RandomInstance(n, rng);
    const auto want = BruteForceLaw(m, 2.0);
    for (int rep = 0; rep < 5; ++rep) {
      const auto law = SequentialLaw(m, Eps(2.0, gamma), noisy, rng);
      for (std::size_t k = 0; k < want.size(); ++k) {
        EXPECT_LE(std::abs(std::log(law[k] / want[k])), gamma + 1e-12);
      }
    }
  }
}

TEST(SequentialSampleTest, ChiSquareAgainstGibbs) {
  Rng rng(7);
  const auto m = RandomInstance(4, rng);
  const auto want = BruteForceLaw(m, 2.0);
  const auto perms = EnumerateAssignments(4);
  ExactPermanentEstimator exact;
  std::vector<std::uint64_t> counts(24, 0);
  constexpr int kDraws = 100000;
  for (int d = 0; d < kDraws; ++d) {
    const MatchingSample s = SequentialSample(m, Eps(2.0), exact, rng);
    const auto it = std::find(perms.begin(), perms.end(), s.assignment);
    ASSERT_NE(it, perms.end());
    ++counts[it - perms.begin()];
  }
  EXPECT_GT(ChiSquarePValue(oracle::ChiSquare(counts, want), 23), 0.001);
}

TEST(SequentialSampleTest, DistortionReport) {
  Rng rng(8);
  const auto m = RandomInstance(3, rng);
  NoisyPermanentEstimator noisy;
  const MatchingSample s =
      SequentialSample(m, PrivacyParams{1.0, 0.01, 0.2}, noisy, rng);
  EXPECT_LE(s.log_distortion_bound, 0.2 + 1e-15);
  EXPECT_LE(s.failure_probability, 0.01 + 1e-15);
  ExactPermanentEstimator exact;
  const MatchingSample e = SequentialSample(m, Eps(1.0), exact, rng);
  EXPECT_EQ(e.log_distortion_bound, 0.0);
  EXPECT_EQ(e.failure_probability, 0.0);
}

TEST(MatchingPaymentTest, ZeroRowAndEqualValues) {
  Rng rng(9);
  ExactPermanentEstimator exact;
  auto m = RandomInstance(4, rng);
  m = m.WithRow(2, std::vector<double>(4, 0.0));
  EXPECT_EQ(MatchingPayment(m, Eps(2.0), 2, exact, rng), 0.0);
  const auto flat = MatchingInstance::FromRows(
      {{0.4, 0.4, 0.4}, {0.4, 0.4, 0.4}, {0.4, 0.4, 0.4}});
  for (double p : MatchingPayments(flat, Eps(2.0), exact, rng)) {
    EXPECT_NEAR(p, 0.0, 1e-14);
  }
}

TEST(MatchingPaymentTest, EqualsExplicitRangePayment) {
  Rng rng(10);
  ExactPermanentEstimator exact;
  for (int n = 1; n <= 4; ++n) {
    const auto m = RandomInstance(n, rng);
    const auto explicit_profile = ToExplicitProfile(m);
    const auto core = Payments(explicit_profile, Eps(1.5));
    const auto got = MatchingPayments(m, Eps(1.5), exact, rng);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(got[i], core[i], 1e-9);
  }
}

TEST(MatchingPaymentTest, WithinUnitInterval) {
  Rng rng(11);
  ExactPermanentEstimator exact;
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = RandomInstance(2 + trial % 5, rng);
    for (double p : MatchingPayments(m, Eps(0.5 + trial), exact, rng)) {
      EXPECT_GE(p, -1e-12);
      EXPECT_LE(p, 1.0 + 1e-12);
    }
  }
}

TEST(MatchingPaymentTest, NoisyBiasWithinBudget) {
  Rng rng(12);
  NoisyPermanentEstimator noisy;
  ExactPermanentEstimator exact;
  const auto m = RandomInstance(4, rng);
  const double gamma = 0.1;
  const auto truth = MatchingPayments(m, Eps(1.0), exact, rng);
  for (int rep = 0; rep < 20; ++rep) {
    const auto got = MatchingPayments(m, Eps(1.0, gamma), noisy, rng);
    for (int i = 0; i < 4; ++i) EXPECT_LE(std::abs(got[i] - truth[i]), gamma);
  }
}

TEST(MatchingMechanismTest, NoisyBackendIsGammaIc) {
  Rng rng(13);
  const double gamma = 0.1;
  const PrivacyParams params = Eps(1.0, gamma);
  for (int trial = 0; trial < 3; ++trial) {
    const auto m = RandomInstance(3, rng);
    const Mechanism mech = MatchingMechanism(
        3, params, std::make_shared<NoisyPermanentEstimator>(), 99);
    const CheckReport r = CheckIc(ToExplicitProfile(m), params, mech,
                                  GridRows(MatchingEmbedding(3), 0.25), 1);
    EXPECT_TRUE(r.passed) << r.worst_case_margin;
    EXPECT_NEAR(r.tolerance, gamma + 1e-9, 1e-15);
  }
}

TEST(MatchingMechanismTest, ExactBackendMatchesCore) {
  Rng rng(14);
  const auto m = RandomInstance(3, rng);
  const auto profile = ToExplicitProfile(m);
  const Mechanism mech = MatchingMechanism(
      3, Eps(2.0), std::make_shared<ExactPermanentEstimator>());
  const MechanismEvaluation eval = mech.evaluate(profile);
  const MechanismEvaluation core = ExactMechanism(Eps(2.0)).evaluate(profile);
  for (std::size_t r = 0; r < eval.probs.size(); ++r) {
    EXPECT_NEAR(eval.probs[r], core.probs[r], 1e-12);
  }
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(eval.payments[i], core.payments[i], 1e-9);
}

TEST(ExplicitProfileTest, RoundTrip) {
  Rng rng(15);
  const auto m = RandomInstance(4, rng);
  const auto profile = ToExplicitProfile(m);
  EXPECT_EQ(profile.outcomes(), 24);
  EXPECT_EQ(profile.labels()[0], "0,1,2,3");
  EXPECT_EQ(FromExplicitProfile(profile, 4), m);
}

TEST(SingleMindedTest, RowsAreBasisRows) {
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = RandomSingleMindedInstance(3, rng);
    for (int i = 0; i < 3; ++i) {
      int ones = 0;
      for (double x : m.row(i)) {
        EXPECT_TRUE(x == 0.0 || x == 1.0);
        ones += x == 1.0;
      }
      EXPECT_EQ(ones, 1);
    }
  }
}

TEST(SingleMindedTest, OptCountsCriticalItems) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 6;
    const auto m = RandomSingleMindedInstance(n, rng);
    std::set<int> items;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (m.value(i, j) == 1.0) items.insert(j);
      }
    }
    const OptimalMatching opt = MaxWeightMatching(m);
    EXPECT_DOUBLE_EQ(opt.welfare, static_cast<double>(items.size()));
    EXPECT_DOUBLE_EQ(opt.welfare, oracle::BestAssignment(Rows(m)));
  }
}

TEST(MaxWeightMatchingTest, MatchesBruteForce) {
  Rng rng(18);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = RandomInstance(1 + trial % 7, rng);
    const OptimalMatching opt = MaxWeightMatching(m);
    EXPECT_NEAR(opt.welfare, oracle::BestAssignment(Rows(m)), 1e-12);
    EXPECT_NEAR(m.Welfare(opt.assignment), opt.welfare, 1e-12);
  }
}

}  // namespace
}  // namespace expmech
