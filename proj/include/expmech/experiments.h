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

// Welfare-versus-privacy experiments on the lower-bound instance families:
// single-minded unit-demand matchings and complete graphs whose edges are
// free with probability 1/(2k). Trial t draws its instance from
// Rng::Stream(seed, t), and every epsilon is evaluated on the same
// instances, so results do not depend on the thread count.

#ifndef EXPMECH_EXPERIMENTS_H_
#define EXPMECH_EXPERIMENTS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace expmech {

struct TradeoffRow {
  double epsilon = 0.0;
  // Mean over trials of the exact expected welfare (matchings) or expected
  // cost (trees) of the mechanism, with its standard error.
  double mean = 0.0;
  double mean_stderr = 0.0;
  double mean_opt = 0.0;
  double opt_stderr = 0.0;
  // |mean - mean_opt|.
  double gap = 0.0;
  // Standard error of the per-trial gap.
  double gap_stderr = 0.0;
  // Trees only: fraction of instances whose free edges contain a cycle.
  double critical_cycle_frequency = 0.0;
};

struct TradeoffTable {
  std::vector<TradeoffRow> rows;
  int size = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  // Gap target (n / 10 or k / 24) and the smallest tested epsilon meeting
  // it, or a negative value when none does.
  double gap_target = 0.0;
  double smallest_epsilon_meeting_target = -1.0;
};

TradeoffTable MatchingLowerBoundExperiment(int n,
                                           std::span<const double> epsilons,
                                           int trials, std::uint64_t seed);
TradeoffTable MatchingLowerBoundExperimentSerial(
    int n, std::span<const double> epsilons, int trials, std::uint64_t seed);

TradeoffTable TreeLowerBoundExperiment(int k, std::span<const double> epsilons,
                                       int trials, std::uint64_t seed);
TradeoffTable TreeLowerBoundExperimentSerial(int k,
                                             std::span<const double> epsilons,
                                             int trials, std::uint64_t seed);

}  // namespace expmech

#endif  // EXPMECH_EXPERIMENTS_H_
