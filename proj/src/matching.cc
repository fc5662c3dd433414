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

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "expmech/error.h"
#include "expmech/kernels.h"

namespace expmech {
namespace {

constexpr int kMaxEnumerationOrder = 9;
constexpr int kMaxLawOrder = 8;

std::vector<int> Range(int begin, int end) {
  std::vector<int> v(std::max(0, end - begin));
  std::iota(v.begin(), v.end(), begin);
  return v;
}

// Stage log-weights for `agent` over `free_items`: L[agent][j] plus the log
// permanent of rows agent+1..n-1 against the free items other than j.
std::vector<double> StageLogWeights(const WeightMatrix& weights, int agent,
                                    const std::vector<int>& free_items,
                                    const PermanentEstimator& estimator,
                                    double accuracy, double failure,
                                    Rng& rng) {
  const int n = weights.order();
  const std::vector<int> rows = Range(agent + 1, n);
  std::vector<double> lw(free_items.size());
  std::vector<int> cols;
  for (std::size_t a = 0; a < free_items.size(); ++a) {
    const int item = free_items[a];
    lw[a] = weights.log_entry(agent, item);
    if (rows.empty()) continue;
    cols.clear();
    for (int other : free_items) {
      if (other != item) cols.push_back(other);
    }
    lw[a] += estimator.LogPermanent(weights.Submatrix(rows, cols), accuracy,
                                    failure, rng);
  }
  return lw;
}

std::vector<double> Normalise(const std::vector<double>& lw) {
  const double total = kernels::LogSumExp(lw);
  std::vector<double> p(lw.size());
  for (std::size_t k = 0; k < lw.size(); ++k) p[k] = std::exp(lw[k] - total);
  return p;
}

int DrawIndex(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  int last = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    last = static_cast<int>(k);
    if (u < cumulative) return last;
  }
  return last;
}

// Lexicographic rank of a permutation (Lehmer code).
std::size_t PermutationRank(const Assignment& perm) {
  const int n = static_cast<int>(perm.size());
  std::size_t rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int k = i + 1; k < n; ++k) {
      if (perm[k] < perm[i]) ++smaller;
    }
    rank = rank * (n - i) + smaller;
  }
  return rank;
}

// Per-query log-permanent accuracy that keeps the total payment error within
// gamma: a row-marginal distortion of at most e^{2a} - 1 <= 2a(1 + 2gamma)
// plus (2 / eps) * 2a from the two partition terms.
double PaymentAccuracy(const PrivacyParams& params) {
  if (params.gamma <= 0.0) return 0.0;
  const double g = params.gamma;
  return g / (2.0 * (1.0 + 2.0 * g) + 4.0 / params.epsilon);
}

PrivacyParams WithGamma(PrivacyParams params, double gamma) {
  params.gamma = gamma;
  return params;
}

void CheckAgent(const MatchingInstance& instance, int agent) {
  if (agent < 0 || agent >= instance.size()) {
    throw InputError("agent index out of range");
  }
}

}  // namespace

MatchingInstance::MatchingInstance(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (n_ < 1) throw InputError("matching instance needs at least one agent");
  if (n_ > kMaxPermanentOrder) {
    throw CapExceeded("matching instance has " + std::to_string(n_) +
                      " agents, above the exact cap of " +
                      std::to_string(kMaxPermanentOrder));
  }
  if (values_.size() != static_cast<std::size_t>(n_) * n_) {
    throw InputError("matching value table must be n x n");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      std::ostringstream msg;
      msg << "value of agent " << k / n_ << " for item " << k % n_ << " is "
          << v << ", outside [0, 1]";
      throw InputError(msg.str());
    }
  }
}

MatchingInstance MatchingInstance::FromRows(
    const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<double> flat;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) {
      throw InputError("matching value table must be n x n");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return MatchingInstance(n, std::move(flat));
}

MatchingInstance MatchingInstance::Padded(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InputError("matching instance needs an agent");
  const std::size_t items = rows.front().size();
  const std::size_t n = std::max(rows.size(), items);
  std::vector<double> flat(n * n, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != items) throw InputError("value rows are ragged");
    std::copy(rows[i].begin(), rows[i].end(), flat.begin() + i * n);
  }
  return MatchingInstance(static_cast<int>(n), std::move(flat));
}

MatchingInstance MatchingInstance::WithRow(
    int agent, std::span<const double> item_values) const {
  CheckAgent(*this, agent);
  if (static_cast<int>(item_values.size()) != n_) {
    throw InputError("replacement row has wrong length");
  }
  std::vector<double> values = values_;
  std::copy(item_values.begin(), item_values.end(),
            values.begin() + static_cast<std::ptrdiff_t>(agent) * n_);
  return MatchingInstance(n_, std::move(values));
}

double MatchingInstance::Welfare(const Assignment& assignment) const {
  double w = 0.0;
  for (int i = 0; i < n_; ++i) w += value(i, assignment[i]);
  return w;
}

WeightMatrix MatchingWeights(const MatchingInstance& instance,
                             const PrivacyParams& params) {
  params.Validate();
  const double half_eps = params.epsilon / 2.0;
  std::vector<double> logs(instance.values().size());
  for (std::size_t k = 0; k < logs.size(); ++k) {
    logs[k] = half_eps * instance.values()[k];
  }
  return WeightMatrix(instance.size(), std::move(logs));
}

double LogMatchingPartition(const MatchingInstance& instance,
                            const PrivacyParams& params) {
  return LogPermanent(MatchingWeights(instance, params));
}

std::vector<double> AssignmentMarginals(const MatchingInstance& instance,
                                        const PrivacyParams& params) {
  const WeightMatrix weights = MatchingWeights(instance, params);
  const int n = instance.size();
  const double log_z = LogPermanent(weights);
  std::vector<double> marginals(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      marginals[static_cast<std::size_t>(i) * n + j] =
          std::exp(weights.log_entry(i, j) +
                   LogPermanent(weights.WithoutRowCol(i, j)) - log_z);
    }
  }
  return marginals;
}

double ExpectedMatchingWelfare(const MatchingInstance& instance,
                               const PrivacyParams& params) {
  const std::vector<double> marginals = AssignmentMarginals(instance, params);
  double w = 0.0;
  for (std::size_t k = 0; k < marginals.size(); ++k) {
    w += marginals[k] * instance.values()[k];
  }
  return w;
}

double MatchingEntropy(const MatchingInstance& instance,
                       const PrivacyParams& params) {
  return std::max(0.0, LogMatchingPartition(instance, params) -
                           params.epsilon / 2.0 *
                               ExpectedMatchingWelfare(instance, params));
}

MatchingSample SequentialSample(const MatchingInstance& instance,
                                const PrivacyParams& params,
                                const PermanentEstimator& estimator,
                                Rng& rng) {
  const WeightMatrix weights = MatchingWeights(instance, params);
  const int n = instance.size();
  const double accuracy = params.gamma / (2.0 * n);
  const double failure = params.delta / (static_cast<double>(n) * n);
  std::vector<int> free_items = Range(0, n);
  MatchingSample sample;
  sample.assignment.resize(n);
  for (int agent = 0; agent < n; ++agent) {
    const std::vector<double> probs = Normalise(StageLogWeights(
        weights, agent, free_items, estimator, accuracy, failure, rng));
    const int pick = DrawIndex(probs, rng);
    sample.assignment[agent] = free_items[pick];
    free_items.erase(free_items.begin() + pick);
  }
  if (!estimator.is_exact()) {
    sample.log_distortion_bound = params.gamma;
    sample.failure_probability = params.delta;
  }
  return sample;
}

std::vector<Assignment> EnumerateAssignments(int n) {
  if (n < 1 || n > kMaxEnumerationOrder) {
    throw CapExceeded("explicit matching enumeration supports 1 <= n <= " +
                      std::to_string(kMaxEnumerationOrder));
  }
  std::vector<Assignment> all;
  Assignment perm = Range(0, n);
  do {
    all.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return all;
}

std::vector<double> SequentialLaw(const MatchingInstance& instance,
                                  const PrivacyParams& params,
                                  const PermanentEstimator& estimator,
                                  Rng& rng) {
  const int n = instance.size();
  if (n > kMaxLawOrder) {
    throw CapExceeded("sampler law enumeration supports n <= " +
                      std::to_string(kMaxLawOrder));
  }
  const WeightMatrix weights = MatchingWeights(instance, params);
  const double accuracy = params.gamma / (2.0 * n);
  const double failure = params.delta / (static_cast<double>(n) * n);

  std::vector<double> law;
  law.reserve(static_cast<std::size_t>(std::tgamma(n + 1) + 0.5));
  std::vector<int> free_items = Range(0, n);
  // Depth-first over decisions with items tried in ascending order, so the
  // leaves appear in lexicographic order.
  auto visit = [&](auto& self, int agent, double prob) -> void {
    if (agent == n) {
      law.push_back(prob);
      return;
    }
    const std::vector<double> probs = Normalise(StageLogWeights(
        weights, agent, free_items, estimator, accuracy, failure, rng));
    const std::vector<int> here = free_items;
    for (std::size_t k = 0; k < here.size(); ++k) {
      free_items = here;
      free_items.erase(free_items.begin() + static_cast<std::ptrdiff_t>(k));
      self(self, agent + 1, prob * probs[k]);
    }
    free_items = here;
  };
  visit(visit, 0, 1.0);
  return law;
}

double MatchingPayment(const MatchingInstance& instance,
                       const PrivacyParams& params, int agent,
                       const PermanentEstimator& estimator, Rng& rng) {
  CheckAgent(instance, agent);
  const WeightMatrix weights = MatchingWeights(instance, params);
  const int n = instance.size();
  const double accuracy = PaymentAccuracy(params);
  const double failure = params.delta / (2.0 * n + 2.0);

  // E[v_i] from agent i's row marginals.
  std::vector<double> lw(n);
  for (int j = 0; j < n; ++j) {
    lw[j] = weights.log_entry(agent, j);
    if (n > 1) {
      lw[j] += estimator.LogPermanent(weights.WithoutRowCol(agent, j),
                                      accuracy, failure, rng);
    }
  }
  const std::vector<double> row_marginals = Normalise(lw);
  double own = 0.0;
  for (int j = 0; j < n; ++j) own += row_marginals[j] * instance.value(agent, j);

  std::vector<double> zeroed = weights.log_entries();
  std::fill(zeroed.begin() + static_cast<std::ptrdiff_t>(agent) * n,
            zeroed.begin() + static_cast<std::ptrdiff_t>(agent + 1) * n, 0.0);
  const double log_perm =
      estimator.LogPermanent(weights, accuracy, failure, rng);
  const double log_perm_zeroed = estimator.LogPermanent(
      WeightMatrix(n, std::move(zeroed)), accuracy, failure, rng);
  return own - 2.0 / params.epsilon * (log_perm - log_perm_zeroed);
}

std::vector<double> MatchingPayments(const MatchingInstance& instance,
                                     const PrivacyParams& params,
                                     const PermanentEstimator& estimator,
                                     Rng& rng) {
  std::vector<double> payments(instance.size());
  for (int i = 0; i < instance.size(); ++i) {
    payments[i] = MatchingPayment(instance, params, i, estimator, rng);
  }
  return payments;
}

MatchingRun RunMatchingMechanism(const MatchingInstance& instance,
                                 const PrivacyParams& params,
                                 const PermanentEstimator& estimator,
                                 Rng& rng) {
  params.Validate();
  MatchingRun run;
  run.assignment =
      SequentialSample(instance, WithGamma(params, params.gamma / 8.0),
                       estimator, rng)
          .assignment;
  run.payments = MatchingPayments(
      instance, WithGamma(params, params.gamma / 4.0), estimator, rng);
  run.welfare = instance.Welfare(run.assignment);
  run.log_partition = LogMatchingPartition(instance, params);
  run.expected_welfare = ExpectedMatchingWelfare(instance, params);
  run.entropy = std::max(
      0.0, run.log_partition - params.epsilon / 2.0 * run.expected_welfare);
  return run;
}

MatchingInstance RandomSingleMindedInstance(int n, Rng& rng) {
  std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    values[static_cast<std::size_t>(i) * n + rng.Below(n)] = 1.0;
  }
  return MatchingInstance(n, std::move(values));
}

OptimalMatching MaxWeightMatching(const MatchingInstance& instance) {
  // Hungarian method on costs -v with 1-based potentials.
  const int n = instance.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -instance.value(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  OptimalMatching best;
  best.assignment.assign(n, 0);
  for (int j = 1; j <= n; ++j) best.assignment[match[j] - 1] = j - 1;
  best.welfare = instance.Welfare(best.assignment);
  return best;
}

ValuationProfile ToExplicitProfile(const MatchingInstance& instance) {
  const int n = instance.size();
  const std::vector<Assignment> all = EnumerateAssignments(n);
  std::vector<double> values(static_cast<std::size_t>(n) * all.size());
  std::vector<std::string> labels;
  labels.reserve(all.size());
  for (std::size_t r = 0; r < all.size(); ++r) {
    std::string label;
    for (int i = 0; i < n; ++i) {
      values[static_cast<std::size_t>(i) * all.size() + r] =
          instance.value(i, all[r][i]);
      label += (i ? "," : "") + std::to_string(all[r][i]);
    }
    labels.push_back(std::move(label));
  }
  return ValuationProfile(n, static_cast<int>(all.size()), std::move(values),
                          ValueDomain::kValues, std::move(labels));
}

MatchingInstance FromExplicitProfile(const ValuationProfile& profile, int n) {
  if (profile.agents() != n) {
    throw InputError("explicit profile agent count does not match n");
  }
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // Smallest permutation sending i to j.
      Assignment perm;
      for (int item = 0; item < n; ++item) {
        if (item != j) perm.push_back(item);
      }
      perm.insert(perm.begin() + i, j);
      const std::size_t rank = PermutationRank(perm);
      if (rank >= static_cast<std::size_t>(profile.outcomes())) {
        throw InputError("explicit profile is not a matching range");
      }
      values[static_cast<std::size_t>(i) * n + j] =
          profile.value(i, static_cast<int>(rank));
    }
  }
  return MatchingInstance(n, std::move(values));
}

BidEmbedding MatchingEmbedding(int n) {
  auto all = std::make_shared<const std::vector<Assignment>>(
      EnumerateAssignments(n));
  BidEmbedding e;
  e.dims = n;
  e.low = 0.0;
  e.high = 1.0;
  e.embed = [all](int agent, std::span<const double> item_values) {
    std::vector<double> row(all->size());
    for (std::size_t r = 0; r < all->size(); ++r) {
      row[r] = item_values[(*all)[r][agent]];
    }
    return row;
  };
  return e;
}

Mechanism MatchingMechanism(int n, const PrivacyParams& params,
                            std::shared_ptr<const PermanentEstimator> estimator,
                            std::uint64_t seed) {
  return {"matching-" + estimator->name(),
          [n, params, estimator, seed](const ValuationProfile& bids) {
            const MatchingInstance instance = FromExplicitProfile(bids, n);
            Rng rng = Rng::Stream(seed, bids.Fingerprint());
            MechanismEvaluation eval;
            eval.probs = SequentialLaw(
                instance, WithGamma(params, params.gamma / 8.0), *estimator,
                rng);
            eval.payments = MatchingPayments(
                instance, WithGamma(params, params.gamma / 4.0), *estimator,
                rng);
            return eval;
          }};
}

}  // namespace expmech
