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

// The exponential mechanism over an explicit finite range with the
// entropy-based payment rule that makes it truthful.
//
// Allocation: Pr[r] is proportional to mu(r) * exp((eps / 2) * sum_i b_i(r)),
// with mu uniform unless a prior is supplied.
//
// Payment of agent i:
//   p_i = -E[sum_{k != i} b_k(r)] - (2 / eps) * S(Gibbs) + (2 / eps) * ln Z_{-i}
// where S is the Shannon entropy and Z_{-i} the partition function with
// agent i removed. With a prior the entropy term becomes -KL(Gibbs || mu)
// and Z_{-i} is mu-weighted. Both collapse to
//   p_i = E[b_i(r)] - (2 / eps) * (ln Z - ln Z_{-i}),
// which is the form evaluated here; it avoids differencing two large
// expectations.
//
// All quantities are computed in the log domain: eps * n can reach the
// hundreds, where direct exponentiation overflows.

#ifndef EXPMECH_MECHANISM_H_
#define EXPMECH_MECHANISM_H_

#include <optional>
#include <span>
#include <vector>

#include "expmech/rng.h"
#include "expmech/valuation.h"

namespace expmech {

// Probability mass over the range. log_weights are unnormalised; probs are
// exp(log_weights - log_normalizer). probs may underflow to zero for very
// large eps, so log-domain consumers should use LogProb.
struct OutcomeDistribution {
  std::vector<double> probs;
  std::vector<double> log_weights;
  double log_normalizer = 0.0;

  static OutcomeDistribution FromLogWeights(std::vector<double> log_weights);

  int size() const { return static_cast<int>(probs.size()); }
  double LogProb(int r) const { return log_weights[r] - log_normalizer; }
  std::vector<double> LogProbs() const;
};

struct MechanismResult {
  int outcome = 0;
  std::vector<double> payments;
  double entropy = 0.0;  // nats
  double log_partition = 0.0;
  double expected_welfare = 0.0;
};

OutcomeDistribution GibbsDistribution(const ValuationProfile& profile,
                                      const PrivacyParams& params,
                                      const PriorDistribution* prior = nullptr);

// Inverse-CDF draw.
int SampleOutcome(const OutcomeDistribution& dist, Rng& rng);

// ln sum_r mu(r) * exp((eps / 2) * sum_{k != excluded} b_k(r)). The 2 / eps
// scaling of the payment rule is left to the caller.
double LogPartition(const ValuationProfile& profile,
                    const PrivacyParams& params,
                    std::optional<int> exclude_agent = std::nullopt,
                    const PriorDistribution* prior = nullptr);

double ShannonEntropy(const OutcomeDistribution& dist);
// Entropy of a plain probability vector, 0 ln 0 := 0.
double ShannonEntropy(std::span<const double> probs);

double KlDivergence(const OutcomeDistribution& dist,
                    const PriorDistribution& prior);
double KlDivergence(std::span<const double> probs,
                    const PriorDistribution& prior);

// E_{r ~ dist}[f(r)].
double Expectation(const OutcomeDistribution& dist, std::span<const double> f);

double Payment(const ValuationProfile& bids, const PrivacyParams& params,
               int agent, const PriorDistribution* prior = nullptr);

// Payments of every agent; shares the Gibbs distribution across agents.
std::vector<double> Payments(const ValuationProfile& bids,
                             const PrivacyParams& params,
                             const OutcomeDistribution& dist,
                             const PriorDistribution* prior = nullptr);
std::vector<double> Payments(const ValuationProfile& bids,
                             const PrivacyParams& params,
                             const PriorDistribution* prior = nullptr);

MechanismResult RunMechanism(const ValuationProfile& bids,
                             const PrivacyParams& params, Rng& rng,
                             const PriorDistribution* prior = nullptr);

// E_nu[welfare] + (2 / eps) * S(nu), or E_nu[welfare] - (2 / eps) *
// KL(nu || mu) when a prior is given. Maximised by the Gibbs distribution.
double FreeSocialWelfare(std::span<const double> probs,
                         const ValuationProfile& profile,
                         const PrivacyParams& params,
                         const PriorDistribution* prior = nullptr);
double FreeSocialWelfare(const OutcomeDistribution& dist,
                         const ValuationProfile& profile,
                         const PrivacyParams& params,
                         const PriorDistribution* prior = nullptr);

// Deterministic welfare maximiser with Clarke pivot payments; the
// eps -> infinity comparator. Ties go to the lowest index.
struct VcgResult {
  int outcome = 0;
  std::vector<double> payments;
};
VcgResult VcgReference(const ValuationProfile& profile);

}  // namespace expmech

#endif  // EXPMECH_MECHANISM_H_
