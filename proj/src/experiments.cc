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

#include "expmech/experiments.h"

#include <cmath>
#include <exception>
#include <functional>

#include "expmech/error.h"
#include "expmech/matching.h"
#include "expmech/rng.h"
#include "expmech/spanning_tree.h"

namespace expmech {
namespace {

// Per-trial measurements: value[e] for each epsilon, plus opt and a flag.
struct Trial {
  std::vector<double> value;
  double opt = 0.0;
  bool critical_cycle = false;
};

using TrialFn = std::function<Trial(std::uint64_t trial)>;

std::vector<Trial> RunTrials(int trials, const TrialFn& fn, bool parallel) {
  std::vector<Trial> out(trials);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int t = 0; t < trials; ++t) {
    try {
      out[t] = fn(static_cast<std::uint64_t>(t));
    } catch (...) {
#pragma omp critical(expmech_experiment_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

void CheckArgs(int size, std::span<const double> epsilons, int trials) {
  if (size < 2) throw InputError("experiment size must be at least 2");
  if (trials < 2) throw InputError("experiment needs at least two trials");
  if (epsilons.empty()) throw InputError("experiment needs an epsilon grid");
  for (double e : epsilons) PrivacyParams{e, 0.0, 0.0}.Validate();
}

double Mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / x.size();
}

double StdErr(const std::vector<double>& x) {
  const double m = Mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / (x.size() - 1) / x.size());
}

TradeoffTable Summarise(const std::vector<Trial>& trials,
                        std::span<const double> epsilons, int size,
                        std::uint64_t seed, double target) {
  TradeoffTable table;
  table.size = size;
  table.trials = static_cast<int>(trials.size());
  table.seed = seed;
  table.gap_target = target;
  std::vector<double> opt;
  double cycles = 0.0;
  for (const Trial& t : trials) {
    opt.push_back(t.opt);
    cycles += t.critical_cycle ? 1.0 : 0.0;
  }
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    std::vector<double> value;
    std::vector<double> gap;
    for (const Trial& t : trials) {
      value.push_back(t.value[e]);
      gap.push_back(std::abs(t.value[e] - t.opt));
    }
    TradeoffRow row;
    row.epsilon = epsilons[e];
    row.mean = Mean(value);
    row.mean_stderr = StdErr(value);
    row.mean_opt = Mean(opt);
    row.opt_stderr = StdErr(opt);
    row.gap = Mean(gap);
    row.gap_stderr = StdErr(gap);
    row.critical_cycle_frequency = cycles / trials.size();
    table.rows.push_back(row);
    if (row.gap <= target && (table.smallest_epsilon_meeting_target < 0.0 ||
                              row.epsilon < table.smallest_epsilon_meeting_target)) {
      table.smallest_epsilon_meeting_target = row.epsilon;
    }
  }
  return table;
}

TradeoffTable MatchingImpl(int n, std::span<const double> epsilons, int trials,
                           std::uint64_t seed, bool parallel) {
  CheckArgs(n, epsilons, trials);
  if (n > kMaxPermanentOrder) {
    throw CapExceeded("matching experiment size exceeds " +
                      std::to_string(kMaxPermanentOrder));
  }
  const std::vector<double> eps(epsilons.begin(), epsilons.end());
  const auto trial = [&](std::uint64_t t) {
    Rng rng = Rng::Stream(seed, t);
    const MatchingInstance instance = RandomSingleMindedInstance(n, rng);
    Trial out;
    out.opt = MaxWeightMatching(instance).welfare;
    for (double e : eps) {
      out.value.push_back(
          ExpectedMatchingWelfare(instance, PrivacyParams{e, 0.0, 0.0}));
    }
    return out;
  };
  return Summarise(RunTrials(trials, trial, parallel), epsilons, n, seed,
                   n / 10.0);
}

TradeoffTable TreeImpl(int k, std::span<const double> epsilons, int trials,
                       std::uint64_t seed, bool parallel) {
  CheckArgs(k, epsilons, trials);
  const std::vector<double> eps(epsilons.begin(), epsilons.end());
  const auto trial = [&](std::uint64_t t) {
    Rng rng = Rng::Stream(seed, t);
    const TreeInstance instance = RandomCriticalInstance(k, rng);
    Trial out;
    out.opt = MinimumSpanningTree(instance).cost;
    out.critical_cycle = HasCriticalCycle(instance);
    for (double e : eps) {
      out.value.push_back(
          ExpectedTotalCost(instance, PrivacyParams{e, 0.0, 0.0}));
    }
    return out;
  };
  return Summarise(RunTrials(trials, trial, parallel), epsilons, k, seed,
                   k / 24.0);
}

}  // namespace

TradeoffTable MatchingLowerBoundExperiment(int n,
                                           std::span<const double> epsilons,
                                           int trials, std::uint64_t seed) {
  return MatchingImpl(n, epsilons, trials, seed, true);
}

TradeoffTable MatchingLowerBoundExperimentSerial(
    int n, std::span<const double> epsilons, int trials, std::uint64_t seed) {
  return MatchingImpl(n, epsilons, trials, seed, false);
}

TradeoffTable TreeLowerBoundExperiment(int k, std::span<const double> epsilons,
                                       int trials, std::uint64_t seed) {
  return TreeImpl(k, epsilons, trials, seed, true);
}

TradeoffTable TreeLowerBoundExperimentSerial(int k,
                                             std::span<const double> epsilons,
                                             int trials, std::uint64_t seed) {
  return TreeImpl(k, epsilons, trials, seed, false);
}

}  // namespace expmech
