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

// Brute-force certification of mechanism properties on enumerable ranges.
//
// A mechanism is treated as a black box mapping a reported profile to an
// outcome law and a payment vector. Expected utilities are computed exactly
// from the returned law; sampling only appears where the property is itself
// about samples (the welfare tail).

#ifndef EXPMECH_VERIFICATION_H_
#define EXPMECH_VERIFICATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "expmech/mechanism.h"
#include "expmech/rng.h"
#include "expmech/valuation.h"

namespace expmech {

struct CheckReport {
  std::string check_name;
  bool passed = false;
  double worst_case_margin = 0.0;
  std::optional<std::string> witness;
  std::uint64_t samples_used = 0;
  double tolerance = 0.0;
  // Quantities reported alongside the verdict but not asserted.
  std::vector<std::pair<std::string, double>> notes;

  // Sets passed from the margin: passed iff margin >= -tolerance.
  void Decide() { passed = worst_case_margin >= -tolerance; }
};

// Outcome law and payments of a mechanism on one reported profile.
// log_probs may be left empty, in which case ln(probs) is used.
struct MechanismEvaluation {
  std::vector<double> probs;
  std::vector<double> log_probs;
  std::vector<double> payments;

  double LogProb(int r) const;
};

// Must be safe to call concurrently; stateful mechanisms derive any
// randomness from the bids they are given.
struct Mechanism {
  std::string name;
  std::function<MechanismEvaluation(const ValuationProfile& bids)> evaluate;
};

// Exact exponential mechanism (optionally prior-weighted).
Mechanism ExactMechanism(const PrivacyParams& params,
                         std::optional<PriorDistribution> prior = std::nullopt);
// Negative controls.
Mechanism AllocationOnlyMechanism(const PrivacyParams& params);
Mechanism FlatFeeMechanism(const PrivacyParams& params, double fee);
Mechanism ArgmaxMechanism();
Mechanism OverchargingMechanism(const PrivacyParams& params, double payment);

// How an agent's low-dimensional bid parameters map to a full row over the
// explicit range. Unstructured ranges use the identity; structured backends
// (matchings, trees) expose their own parameterisation so deviations and
// neighbours stay inside the bid language.
struct BidEmbedding {
  int dims = 0;
  double low = 0.0;
  double high = 1.0;
  std::function<std::vector<double>(int agent, std::span<const double> bid)>
      embed;
};
BidEmbedding IdentityEmbedding(int outcomes, ValueDomain domain);

// Candidate replacement rows for one agent.
using RowGenerator = std::function<std::vector<std::vector<double>>(
    int agent, const ValuationProfile& profile, Rng& rng)>;

// Every point of the grid {low, low + step, ..., high}^dims.
RowGenerator GridRows(const BidEmbedding& embedding, double step);
// `count` uniform random rows; with include_extremal, also the all-low and
// all-high rows.
RowGenerator RandomRows(const BidEmbedding& embedding, int count,
                        bool include_extremal);

// Caps for the exhaustive grid on unstructured ranges.
inline constexpr int kIcMaxAgents = 4;
inline constexpr int kIcMaxOutcomes = 6;
inline constexpr std::uint64_t kIcMaxGridPoints = 15625;

inline constexpr double kMarginTolerance = 1e-9;

// Truthful expected utility minus deviating expected utility, minimised
// over agents and candidate bids. Passes iff the minimum is at least
// -(gamma + 1e-9).
CheckReport CheckIc(const ValuationProfile& truth, const PrivacyParams& params,
                    const Mechanism& mechanism, const RowGenerator& deviations,
                    std::uint64_t seed = 0);
// Serial reference for the OpenMP deviation sweep; identical report.
CheckReport CheckIcSerial(const ValuationProfile& truth,
                          const PrivacyParams& params,
                          const Mechanism& mechanism,
                          const RowGenerator& deviations,
                          std::uint64_t seed = 0);
// Exhaustive grid over the raw table. Throws CapExceeded above
// kIcMaxAgents / kIcMaxOutcomes.
CheckReport CheckIc(const ValuationProfile& truth, const PrivacyParams& params,
                    double bid_grid_step, const Mechanism& mechanism);

// Minimum truthful expected utility over agents.
CheckReport CheckIr(const ValuationProfile& truth, const PrivacyParams& params,
                    const Mechanism& mechanism);

// Largest |ln(p / p')| over neighbouring profiles, each agent's row replaced
// by the generator's rows. Passes iff it is at most eps + 1e-9.
CheckReport CheckDp(const ValuationProfile& profile,
                    const PrivacyParams& params, const Mechanism& mechanism,
                    const RowGenerator& neighbours, Rng& rng);
// Default neighbours: `neighbour_count` random rows per agent plus the
// all-zero and all-one extremes.
CheckReport CheckDp(const ValuationProfile& profile,
                    const PrivacyParams& params, int neighbour_count, Rng& rng);

// Frequency of welfare below max - 2 (ln|R| + t) / eps in `sample_count`
// Gibbs draws must not exceed e^-t plus three binomial standard deviations.
// The un-doubled threshold max - (ln|R| + t) / eps is reported, not asserted.
CheckReport CheckWelfareTail(const ValuationProfile& profile,
                             const PrivacyParams& params, double t,
                             std::uint64_t sample_count, Rng& rng);

// Free social welfare of the Gibbs law versus `trials` random simplex
// points, every +-0.01 coordinate perturbation, the uniform law and the
// argmax point mass.
CheckReport CheckFreeEnergy(const ValuationProfile& profile,
                            const PrivacyParams& params, int trials, Rng& rng);
// Same comparison under the prior-weighted (KL) objective.
CheckReport CheckKlObjective(const ValuationProfile& profile,
                             const PrivacyParams& params,
                             const PriorDistribution& prior, int trials,
                             Rng& rng);

// For random cycles v^1..v^t of one agent's valuation (others fixed),
// sum_k E[v^k(x(v^k))] - sum_k E[v^{k+1}(x(v^k))] >= -1e-9.
CheckReport CheckCyclicMonotonicity(const ValuationProfile& profile,
                                    const PrivacyParams& params,
                                    const Mechanism& mechanism,
                                    const BidEmbedding& embedding,
                                    int cycle_length, int trials, Rng& rng);
CheckReport CheckCyclicMonotonicity(const ValuationProfile& profile,
                                    const PrivacyParams& params,
                                    int cycle_length, int trials, Rng& rng);

// Expected utility of `agent` with true row `truth_row` under `evaluation`.
double ExpectedUtility(const MechanismEvaluation& evaluation,
                       std::span<const double> truth_row, int agent);

}  // namespace expmech

#endif  // EXPMECH_VERIFICATION_H_
