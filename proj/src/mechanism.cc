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

#include "expmech/mechanism.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "expmech/error.h"
#include "expmech/kernels.h"

namespace expmech {
namespace {

void CheckPrior(const ValuationProfile& profile,
                const PriorDistribution* prior) {
  if (prior != nullptr && prior->size() != profile.outcomes()) {
    throw InputError("prior size does not match range size");
  }
}

std::vector<double> LogWeights(const ValuationProfile& profile,
                               const PrivacyParams& params,
                               std::optional<int> exclude,
                               const PriorDistribution* prior) {
  const double half_eps = params.epsilon / 2.0;
  std::vector<double> lw(profile.outcomes());
  for (int r = 0; r < profile.outcomes(); ++r) {
    const double w = exclude ? profile.WelfareExcluding(r, *exclude)
                             : profile.Welfare(r);
    lw[r] = half_eps * w;
    if (prior != nullptr) lw[r] += prior->log_mu()[r];
  }
  return lw;
}

}  // namespace

OutcomeDistribution OutcomeDistribution::FromLogWeights(
    std::vector<double> log_weights) {
  if (log_weights.empty()) throw InputError("empty outcome range");
  OutcomeDistribution dist;
  dist.log_normalizer = kernels::LogSumExp(log_weights);
  if (!std::isfinite(dist.log_normalizer)) {
    throw NumericalError("outcome weights do not normalise");
  }
  dist.probs.resize(log_weights.size());
  for (std::size_t r = 0; r < log_weights.size(); ++r) {
    dist.probs[r] = std::exp(log_weights[r] - dist.log_normalizer);
  }
  dist.log_weights = std::move(log_weights);
  return dist;
}

std::vector<double> OutcomeDistribution::LogProbs() const {
  std::vector<double> lp(log_weights.size());
  for (std::size_t r = 0; r < lp.size(); ++r) {
    lp[r] = log_weights[r] - log_normalizer;
  }
  return lp;
}

OutcomeDistribution GibbsDistribution(const ValuationProfile& profile,
                                      const PrivacyParams& params,
                                      const PriorDistribution* prior) {
  params.Validate();
  CheckPrior(profile, prior);
  return OutcomeDistribution::FromLogWeights(
      LogWeights(profile, params, std::nullopt, prior));
}

int SampleOutcome(const OutcomeDistribution& dist, Rng& rng) {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  int last_positive = 0;
  for (int r = 0; r < dist.size(); ++r) {
    if (dist.probs[r] <= 0.0) continue;
    cumulative += dist.probs[r];
    last_positive = r;
    if (u < cumulative) return r;
  }
  // Rounding left the cumulative mass just below u.
  return last_positive;
}

double LogPartition(const ValuationProfile& profile,
                    const PrivacyParams& params,
                    std::optional<int> exclude_agent,
                    const PriorDistribution* prior) {
  params.Validate();
  CheckPrior(profile, prior);
  if (exclude_agent &&
      (*exclude_agent < 0 || *exclude_agent >= profile.agents())) {
    throw InputError("excluded agent index out of range");
  }
  return kernels::LogSumExp(LogWeights(profile, params, exclude_agent, prior));
}

double ShannonEntropy(const OutcomeDistribution& dist) {
  double s = 0.0;
  for (int r = 0; r < dist.size(); ++r) {
    if (dist.probs[r] > 0.0) s -= dist.probs[r] * dist.LogProb(r);
  }
  return std::max(s, 0.0);
}

double ShannonEntropy(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

double KlDivergence(const OutcomeDistribution& dist,
                    const PriorDistribution& prior) {
  if (prior.size() != dist.size()) {
    throw InputError("prior size does not match range size");
  }
  double kl = 0.0;
  for (int r = 0; r < dist.size(); ++r) {
    if (dist.probs[r] > 0.0) {
      kl += dist.probs[r] * (dist.LogProb(r) - prior.log_mu()[r]);
    }
  }
  return std::max(kl, 0.0);
}

double KlDivergence(std::span<const double> probs,
                    const PriorDistribution& prior) {
  if (static_cast<int>(probs.size()) != prior.size()) {
    throw InputError("prior size does not match range size");
  }
  double kl = 0.0;
  for (std::size_t r = 0; r < probs.size(); ++r) {
    if (probs[r] > 0.0) {
      kl += probs[r] * (std::log(probs[r]) - prior.log_mu()[r]);
    }
  }
  return std::max(kl, 0.0);
}

double Expectation(const OutcomeDistribution& dist,
                   std::span<const double> f) {
  return kernels::ShiftedWeightedSum(dist.log_weights, f, dist.log_normalizer);
}

std::vector<double> Payments(const ValuationProfile& bids,
                             const PrivacyParams& params,
                             const OutcomeDistribution& dist,
                             const PriorDistribution* prior) {
  const double scale = 2.0 / params.epsilon;
  std::vector<double> payments(bids.agents());
  for (int i = 0; i < bids.agents(); ++i) {
    const double own = Expectation(dist, bids.row(i));
    const double log_z_without =
        LogPartition(bids, params, i, prior);
    payments[i] = own - scale * (dist.log_normalizer - log_z_without);
  }
  return payments;
}

std::vector<double> Payments(const ValuationProfile& bids,
                             const PrivacyParams& params,
                             const PriorDistribution* prior) {
  return Payments(bids, params, GibbsDistribution(bids, params, prior), prior);
}

double Payment(const ValuationProfile& bids, const PrivacyParams& params,
               int agent, const PriorDistribution* prior) {
  if (agent < 0 || agent >= bids.agents()) {
    throw InputError("agent index out of range");
  }
  const OutcomeDistribution dist = GibbsDistribution(bids, params, prior);
  const double own = Expectation(dist, bids.row(agent));
  const double log_z_without = LogPartition(bids, params, agent, prior);
  return own - (2.0 / params.epsilon) * (dist.log_normalizer - log_z_without);
}

MechanismResult RunMechanism(const ValuationProfile& bids,
                             const PrivacyParams& params, Rng& rng,
                             const PriorDistribution* prior) {
  const OutcomeDistribution dist = GibbsDistribution(bids, params, prior);
  MechanismResult result;
  result.outcome = SampleOutcome(dist, rng);
  result.payments = Payments(bids, params, dist, prior);
  result.entropy = ShannonEntropy(dist);
  result.log_partition = dist.log_normalizer;
  result.expected_welfare = Expectation(dist, bids.WelfareVector());
  return result;
}

double FreeSocialWelfare(std::span<const double> probs,
                         const ValuationProfile& profile,
                         const PrivacyParams& params,
                         const PriorDistribution* prior) {
  params.Validate();
  if (static_cast<int>(probs.size()) != profile.outcomes()) {
    throw InputError("distribution size does not match range size");
  }
  double welfare = 0.0;
  for (int r = 0; r < profile.outcomes(); ++r) {
    if (probs[r] > 0.0) welfare += probs[r] * profile.Welfare(r);
  }
  const double scale = 2.0 / params.epsilon;
  if (prior != nullptr) return welfare - scale * KlDivergence(probs, *prior);
  return welfare + scale * ShannonEntropy(probs);
}

double FreeSocialWelfare(const OutcomeDistribution& dist,
                         const ValuationProfile& profile,
                         const PrivacyParams& params,
                         const PriorDistribution* prior) {
  params.Validate();
  const double welfare = Expectation(dist, profile.WelfareVector());
  const double scale = 2.0 / params.epsilon;
  if (prior != nullptr) return welfare - scale * KlDivergence(dist, *prior);
  return welfare + scale * ShannonEntropy(dist);
}

VcgResult VcgReference(const ValuationProfile& profile) {
  VcgResult result;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < profile.outcomes(); ++r) {
    const double w = profile.Welfare(r);
    if (w > best) {
      best = w;
      result.outcome = r;
    }
  }
  result.payments.resize(profile.agents());
  for (int i = 0; i < profile.agents(); ++i) {
    double best_without = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < profile.outcomes(); ++r) {
      best_without = std::max(best_without, profile.WelfareExcluding(r, i));
    }
    result.payments[i] =
        best_without - profile.WelfareExcluding(result.outcome, i);
  }
  return result;
}

}  // namespace expmech
