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

// Unit-demand multi-item auction: n agents, n items, outcomes are the n!
// perfect matchings. The Gibbs partition function is the permanent of
// A[i][j] = exp((eps / 2) * v_ij), so allocation and payments reduce to
// permanents of A and its minors.

#ifndef EXPMECH_MATCHING_H_
#define EXPMECH_MATCHING_H_

#include <span>
#include <vector>

#include "expmech/permanent.h"
#include "expmech/rng.h"
#include "expmech/valuation.h"
#include "expmech/verification.h"

namespace expmech {

// item assigned to each agent
using Assignment = std::vector<int>;

class MatchingInstance {
 public:
  // Square table values[i * n + j] = v_ij in [0, 1].
  MatchingInstance(int n, std::vector<double> values);
  static MatchingInstance FromRows(const std::vector<std::vector<double>>& rows);
  // Rectangular agents x items table padded with zero-valued dummy agents or
  // dummy items to a square instance.
  static MatchingInstance Padded(const std::vector<std::vector<double>>& rows);

  int size() const { return n_; }
  double value(int agent, int item) const {
    return values_[static_cast<std::size_t>(agent) * n_ + item];
  }
  std::span<const double> row(int agent) const {
    return {values_.data() + static_cast<std::size_t>(agent) * n_,
            static_cast<std::size_t>(n_)};
  }
  const std::vector<double>& values() const { return values_; }
  MatchingInstance WithRow(int agent, std::span<const double> item_values) const;
  double Welfare(const Assignment& assignment) const;

  bool operator==(const MatchingInstance&) const = default;

 private:
  int n_;
  std::vector<double> values_;
};

// Log-entries (eps / 2) * v_ij.
WeightMatrix MatchingWeights(const MatchingInstance& instance,
                             const PrivacyParams& params);

// ln perm(A).
double LogMatchingPartition(const MatchingInstance& instance,
                            const PrivacyParams& params);

// marginals[i * n + j] = Pr[agent i receives item j] under the exact Gibbs
// law, from exp((eps / 2) v_ij) * perm(A_{-i,-j}) / perm(A).
std::vector<double> AssignmentMarginals(const MatchingInstance& instance,
                                        const PrivacyParams& params);

double ExpectedMatchingWelfare(const MatchingInstance& instance,
                               const PrivacyParams& params);

// Entropy of the exact Gibbs law over matchings: ln Z - (eps / 2) E[welfare].
double MatchingEntropy(const MatchingInstance& instance,
                       const PrivacyParams& params);

struct MatchingSample {
  Assignment assignment;
  // Pointwise bound on the ratio between the sampler's law and the Gibbs law
  // (exp of this value), and the probability that the bound fails.
  double log_distortion_bound = 0.0;
  double failure_probability = 0.0;
};

// Assigns agents 0..n-1 in turn. At each stage the free item j is drawn with
// weight exp((eps / 2) v_ij) * perm(remaining rows, free items minus j), the
// permanent coming from `estimator` at accuracy gamma / (2n) and failure
// probability delta / n^2. With the exact estimator the output law is the
// Gibbs law; otherwise it is within exp(+-gamma) of it pointwise.
MatchingSample SequentialSample(const MatchingInstance& instance,
                                const PrivacyParams& params,
                                const PermanentEstimator& estimator, Rng& rng);

// All n! assignments in lexicographic order (n <= 9).
std::vector<Assignment> EnumerateAssignments(int n);

// Exact law of SequentialSample for one realisation of the estimator's
// randomness, indexed like EnumerateAssignments. Each decision node queries
// the estimator once. n <= 8.
std::vector<double> SequentialLaw(const MatchingInstance& instance,
                                  const PrivacyParams& params,
                                  const PermanentEstimator& estimator,
                                  Rng& rng);

// p_i = E[v_i(r)] - (2 / eps) ln perm(A(v)) + (2 / eps) ln perm(A(0, v_-i)),
// where A(0, v_-i) has agent i's row replaced by ones. With a noisy
// estimator every permanent is queried at an accuracy that keeps the total
// payment error within params.gamma.
double MatchingPayment(const MatchingInstance& instance,
                       const PrivacyParams& params, int agent,
                       const PermanentEstimator& estimator, Rng& rng);
std::vector<double> MatchingPayments(const MatchingInstance& instance,
                                     const PrivacyParams& params,
                                     const PermanentEstimator& estimator,
                                     Rng& rng);

// One run of the mechanism. With slack gamma = params.gamma the allocation
// uses a distortion budget of gamma / 8 and payments an error budget of
// gamma / 4, which bounds every utility comparison by gamma (gamma-IC).
struct MatchingRun {
  Assignment assignment;
  std::vector<double> payments;
  double welfare = 0.0;
  double expected_welfare = 0.0;
  double entropy = 0.0;
  double log_partition = 0.0;
};
MatchingRun RunMatchingMechanism(const MatchingInstance& instance,
                                 const PrivacyParams& params,
                                 const PermanentEstimator& estimator,
                                 Rng& rng);

// Each agent values exactly one uniformly chosen item at 1.
MatchingInstance RandomSingleMindedInstance(int n, Rng& rng);

// Maximum-weight perfect matching (Hungarian method, O(n^3)).
struct OptimalMatching {
  Assignment assignment;
  double welfare = 0.0;
};
OptimalMatching MaxWeightMatching(const MatchingInstance& instance);

// Explicit n!-outcome profile over EnumerateAssignments(n).
ValuationProfile ToExplicitProfile(const MatchingInstance& instance);

// Recovers the instance from an explicit profile laid out by
// ToExplicitProfile.
MatchingInstance FromExplicitProfile(const ValuationProfile& profile, int n);

// Bid language of one agent: a value per item.
BidEmbedding MatchingEmbedding(int n);

// The matching backend as a black-box mechanism over explicit profiles.
// With a noisy estimator every evaluation draws its noise from a stream
// keyed by the bids, so repeated evaluations agree.
Mechanism MatchingMechanism(int n, const PrivacyParams& params,
                            std::shared_ptr<const PermanentEstimator> estimator,
                            std::uint64_t seed = 0);

}  // namespace expmech

#endif  // EXPMECH_MATCHING_H_
