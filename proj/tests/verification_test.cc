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

#include "expmech/verification.h"

#include <cmath>
#include <string>
#include <vector>

#include "expmech/error.h"
#include "expmech/mechanism.h"
#include "expmech/rng.h"
#include "gtest/gtest.h"

namespace expmech {
namespace {

PrivacyParams Eps(double e, double gamma = 0.0) {
  return PrivacyParams{e, 0.0, gamma};
}

ValuationProfile RandomProfile(int agents, int outcomes, Rng& rng) {
  std::vector<double> v(agents * outcomes);
  for (double& x : v) x = rng.Uniform();
  return ValuationProfile(agents, outcomes, v);
}

double Note(const CheckReport& r, const std::string& key) {
  for (const auto& [k, v] : r.notes) {
    if (k == key) return v;
  }
  ADD_FAILURE() << "missing note " << key;
  return 0.0;
}

RowGenerator Fixed(std::vector<std::vector<double>> rows) {
  return [rows](int, const ValuationProfile&, Rng&) { return rows; };
}

TEST(CheckIcTest, ExactCoreOnRandomProfiles) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int agents = 1 + trial % 3;
    const int outcomes = 2 + trial % 2;
    const auto profile = RandomProfile(agents, outcomes, rng);
    const PrivacyParams params = Eps(0.5 + trial % 5);
    const CheckReport r = CheckIc(profile, params, 0.25, ExactMechanism(params));
    EXPECT_TRUE(r.passed) << trial << " " << r.worst_case_margin;
    EXPECT_GE(r.worst_case_margin, -1e-9);
    EXPECT_EQ(r.check_name, "ic");
  }
}

TEST(CheckIcTest, AllocationOnlyFailsWithWitness) {
  const auto profile = ValuationProfile::FromRows({{0.0, 0.5}, {0.5, 0.0}});
  const PrivacyParams params = Eps(2.0);
  const CheckReport r = CheckIc(profile, params, 0.5, AllocationOnlyMechanism(params));
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_LT(r.worst_case_margin, -0.01);
  EXPECT_TRUE(CheckIc(profile, params, 0.5, ExactMechanism(params)).passed);
}

TEST(CheckIcTest, SingleOutcomeIsTrivial) {
  const auto profile = ValuationProfile::FromRows({{0.7}});
  const CheckReport r = CheckIc(profile, Eps(1.0), 0.1, ExactMechanism(Eps(1.0)));
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.worst_case_margin, 0.0, 1e-12);
}

TEST(CheckIcTest, GammaWidensTolerance) {
  Rng rng(2);
  const auto profile = RandomProfile(2, 3, rng);
  const CheckReport r =
      CheckIc(profile, Eps(1.0, 0.3), 0.5, ExactMechanism(Eps(1.0, 0.3)));
  EXPECT_NEAR(r.tolerance, 0.3 + kMarginTolerance, 1e-15);
  EXPECT_NEAR(Note(r, "gamma"), 0.3, 0.0);
}

TEST(CheckIcTest, SerialAndParallelAgree) {
  Rng rng(3);
  const auto profile = RandomProfile(3, 4, rng);
  const PrivacyParams params = Eps(1.5);
  const RowGenerator rows =
      RandomRows(IdentityEmbedding(4, ValueDomain::kValues), 300, true);
  const CheckReport parallel = CheckIc(profile, params, ExactMechanism(params), rows, 9);
  const CheckReport serial =
      CheckIcSerial(profile, params, ExactMechanism(params), rows, 9);
  EXPECT_EQ(parallel.worst_case_margin, serial.worst_case_margin);
  EXPECT_EQ(parallel.samples_used, serial.samples_used);
  EXPECT_EQ(parallel.witness, serial.witness);
}

TEST(CheckIcTest, Caps) {
  Rng rng(4);
  EXPECT_THROW(CheckIc(RandomProfile(5, 2, rng), Eps(1.0), 0.5,
                       ExactMechanism(Eps(1.0))),
               CapExceeded);
  EXPECT_THROW(CheckIc(RandomProfile(2, 7, rng), Eps(1.0), 0.5,
                       ExactMechanism(Eps(1.0))),
               CapExceeded);
  EXPECT_THROW(CheckIc(RandomProfile(2, 6, rng), Eps(1.0), 0.1,
                       ExactMechanism(Eps(1.0))),
               CapExceeded);
}

TEST(CheckIrTest, ExactCorePasses) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto profile = RandomProfile(3, 5, rng);
    const CheckReport r = CheckIr(profile, Eps(1.0 + trial), ExactMechanism(Eps(1.0 + trial)));
    EXPECT_TRUE(r.passed) << r.worst_case_margin;
  }
}

TEST(CheckIrTest, ZeroAgentHasZeroUtility) {
  const auto profile = ValuationProfile::FromRows({{0.0, 0.0, 0.0}, {0.2, 0.9, 0.4}});
  const MechanismEvaluation eval = ExactMechanism(Eps(2.0)).evaluate(profile);
  EXPECT_EQ(ExpectedUtility(eval, profile.row(0), 0), 0.0);
}

TEST(CheckIrTest, FlatFeeFails) {
  const auto profile = ValuationProfile::FromRows({{0.2, 0.3}, {0.9, 0.1}});
  const CheckReport r = CheckIr(profile, Eps(1.0), FlatFeeMechanism(Eps(1.0), 0.5));
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_NE(r.witness->find("agent 0"), std::string::npos);
}

TEST(CheckDpTest, ClosedFormTwoOutcomes) {
  const auto profile = ValuationProfile::FromRows({{0.0, 0.0}});
  const PrivacyParams params = Eps(2.0);
  Rng rng(6);
  const CheckReport r =
      CheckDp(profile, params, ExactMechanism(params), Fixed({{0.0, 1.0}}), rng);
  EXPECT_TRUE(r.passed);
  const double e = std::exp(1.0);
  // The ratio at b is ln(2e / (1 + e)); at a it is ln((1 + e) / 2).
  const auto before = GibbsDistribution(profile, params);
  const auto after =
      GibbsDistribution(ValuationProfile::FromRows({{0.0, 1.0}}), params);
  EXPECT_NEAR(std::log(after.probs[1] / before.probs[1]), std::log(2 * e / (1 + e)),
              1e-14);
  EXPECT_NEAR(std::log(2 * e / (1 + e)), 0.3799, 1e-4);
  EXPECT_NEAR(Note(r, "max_log_ratio"), std::log((1 + e) / 2), 1e-14);
}

TEST(CheckDpTest, IdenticalNeighbourHasZeroRatio) {
  Rng rng(7);
  const auto profile = RandomProfile(2, 4, rng);
  const std::vector<double> row(profile.row(0).begin(), profile.row(0).end());
  const std::vector<double> row1(profile.row(1).begin(), profile.row(1).end());
  const RowGenerator same = [row, row1](int agent, const ValuationProfile&, Rng&) {
    return std::vector<std::vector<double>>{agent == 0 ? row : row1};
  };
  const CheckReport r =
      CheckDp(profile, Eps(1.0), ExactMechanism(Eps(1.0)), same, rng);
  EXPECT_EQ(Note(r, "max_log_ratio"), 0.0);
}

TEST(CheckDpTest, ExactCoreWithinEpsilon) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto profile = RandomProfile(3, 6, rng);
    const double eps = 0.25 * (1 + trial);
    const CheckReport r = CheckDp(profile, Eps(eps), 100, rng);
    EXPECT_TRUE(r.passed);
    EXPECT_LE(Note(r, "max_log_ratio"), eps + 1e-9);
  }
}

TEST(CheckDpTest, ArgmaxFails) {
  Rng rng(9);
  const auto profile = ValuationProfile::FromRows({{0.2, 0.6}, {0.5, 0.0}});
  const CheckReport r = CheckDp(profile, Eps(1.0), ArgmaxMechanism(),
                                Fixed({{1.0, 0.0}, {0.0, 1.0}}), rng);
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(r.witness.has_value());
}

TEST(CheckWelfareTailTest, ConservativeBoundHolds) {
  Rng rng(10);
  const auto profile = RandomProfile(3, 8, rng);
  const CheckReport r = CheckWelfareTail(profile, Eps(2.0), 3.0, 100000, rng);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.samples_used, 100000u);
  // Binomial standard error of the exact probability.
  const double p = Note(r, "exact_probability");
  const double sd = std::sqrt(std::max(p * (1 - p), 1e-12) / 100000);
  EXPECT_NEAR(Note(r, "frequency"), p, 3.0 * sd + 1e-12);
}

TEST(CheckWelfareTailTest, StatedFormAgainstExact) {
  Rng rng(11);
  const auto profile = RandomProfile(4, 8, rng);
  const CheckReport r = CheckWelfareTail(profile, Eps(1.0), 0.5, 100000, rng);
  EXPECT_LE(Note(r, "stated_threshold") - Note(r, "threshold"),
            (std::log(8.0) + 0.5) / 1.0 + 1e-12);
  EXPECT_GE(Note(r, "stated_frequency"), Note(r, "frequency"));
}

TEST(CheckWelfareTailTest, LargeEpsilonNeverMisses) {
  Rng rng(12);
  const auto profile = ValuationProfile::FromRows({{0.1, 0.9, 0.3}});
  const CheckReport r = CheckWelfareTail(profile, Eps(1e4), 1.0, 10000, rng);
  EXPECT_EQ(Note(r, "frequency"), 0.0);
  EXPECT_THROW(CheckWelfareTail(profile, Eps(1.0), 1.0, 100, rng), InputError);
}

TEST(CheckFreeEnergyTest, GibbsIsOptimal) {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const auto profile = RandomProfile(3, 5, rng);
    const CheckReport r = CheckFreeEnergy(profile, Eps(0.5 + trial), 1000, rng);
    EXPECT_TRUE(r.passed) << r.worst_case_margin;
    EXPECT_GE(r.worst_case_margin, -1e-9);
  }
}

TEST(CheckKlObjectiveTest, UniformPriorAgreesWithFreeEnergy) {
  Rng data(14);
  const auto profile = RandomProfile(2, 6, data);
  Rng a(99);
  Rng b(99);
  const CheckReport fe = CheckFreeEnergy(profile, Eps(1.3), 1000, a);
  const CheckReport kl =
      CheckKlObjective(profile, Eps(1.3), PriorDistribution::Uniform(6), 1000, b);
  EXPECT_NEAR(fe.worst_case_margin, kl.worst_case_margin, 1e-12);
  EXPECT_TRUE(kl.passed);
}

TEST(CheckKlObjectiveTest, SkewedPriorAndZeroProfile) {
  Rng rng(15);
  const PriorDistribution prior({0.5, 0.25, 0.125, 0.0625, 0.0625});
  const CheckReport skewed =
      CheckKlObjective(RandomProfile(3, 5, rng), Eps(2.0), prior, 1000, rng);
  EXPECT_TRUE(skewed.passed) << skewed.worst_case_margin;
  // Zero profile: the optimum is the prior itself.
  const auto zero = ValuationProfile::Zero(2, 5);
  const auto gibbs = GibbsDistribution(zero, Eps(2.0), &prior);
  for (int r = 0; r < 5; ++r) EXPECT_NEAR(gibbs.probs[r], prior.mu()[r], 1e-15);
  EXPECT_TRUE(CheckKlObjective(zero, Eps(2.0), prior, 1000, rng).passed);
}

TEST(CheckCyclicMonotonicityTest, ExactCorePasses) {
  Rng rng(16);
  const auto profile = RandomProfile(3, 4, rng);
  for (int length : {2, 3, 4}) {
    const CheckReport r = CheckCyclicMonotonicity(profile, Eps(1.5), length, 200, rng);
    EXPECT_TRUE(r.passed) << length << " " << r.worst_case_margin;
    EXPECT_GE(r.worst_case_margin, -1e-9);
  }
}

TEST(CheckCyclicMonotonicityTest, SingleOutcomeIsEquality) {
  const auto profile = ValuationProfile::FromRows({{0.3}, {0.6}});
  Rng rng(17);
  const CheckReport r = CheckCyclicMonotonicity(profile, Eps(1.0), 3, 20, rng);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.worst_case_margin, 0.0, 1e-12);
}

TEST(CheckReportTest, DecideRule) {
  CheckReport r;
  r.tolerance = 0.1;
  r.worst_case_margin = -0.1;
  r.Decide();
  EXPECT_TRUE(r.passed);
  r.worst_case_margin = -0.1000001;
  r.Decide();
  EXPECT_FALSE(r.passed);
}

TEST(CheckReportTest, DeterministicGivenSeed) {
  Rng data(18);
  const auto profile = RandomProfile(3, 5, data);
  Rng a(5);
  Rng b(5);
  const CheckReport x = CheckDp(profile, Eps(1.0), 50, a);
  const CheckReport y = CheckDp(profile, Eps(1.0), 50, b);
  EXPECT_EQ(x.worst_case_margin, y.worst_case_margin);
  EXPECT_EQ(Note(x, "max_log_ratio"), Note(y, "max_log_ratio"));
}

}  // namespace
}  // namespace expmech
