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

// Public project selection: choose at most k of m projects. The range is
// every subset of size <= k, listed by size and then lexicographically, so
// the empty set comes first.

#ifndef EXPMECH_CPPP_H_
#define EXPMECH_CPPP_H_

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "expmech/rng.h"
#include "expmech/valuation.h"

namespace expmech {

inline constexpr std::uint64_t kMaxCpppRange = 1000000;
// Subsets are keyed by 64-bit masks.
inline constexpr int kMaxProjects = 63;

// Sorted project indices.
using ProjectSet = std::vector<int>;

// sum_{s <= k} C(m, s). Throws CapExceeded above kMaxCpppRange.
std::uint64_t CpppRangeSize(int m, int k);

std::vector<ProjectSet> EnumerateRange(int m, int k);

std::string ProjectSetLabel(const ProjectSet& set);

// Position of a subset in EnumerateRange order and back.
class SubsetIndexer {
 public:
  SubsetIndexer(int m, int k);

  int size() const { return static_cast<int>(subsets_.size()); }
  const std::vector<ProjectSet>& subsets() const { return subsets_; }
  const ProjectSet& Subset(int index) const { return subsets_.at(index); }
  // Throws InputError for unsorted, out-of-range or oversized sets.
  int Index(const ProjectSet& set) const;

 private:
  int m_;
  int k_;
  std::vector<ProjectSet> subsets_;
  std::unordered_map<std::uint64_t, int> index_;
};

using SetValuation = std::function<double(int agent, const ProjectSet& set)>;

class CpppInstance {
 public:
  // values is agents x range, row-major in EnumerateRange order.
  CpppInstance(int m, int k, int agents, std::vector<double> values);
  // Evaluates `valuation` once per (agent, subset).
  static CpppInstance FromCallback(int m, int k, int agents,
                                   const SetValuation& valuation);

  int projects() const { return m_; }
  int max_size() const { return k_; }
  int agents() const { return agents_; }
  int range_size() const { return range_size_; }
  const std::vector<double>& values() const { return values_; }
  double value(int agent, int subset) const {
    return values_[static_cast<std::size_t>(agent) * range_size_ + subset];
  }

  bool operator==(const CpppInstance&) const = default;

 private:
  int m_;
  int k_;
  int agents_;
  int range_size_;
  std::vector<double> values_;
};

ValuationProfile ToExplicitProfile(const CpppInstance& instance);

// Coverage valuations: each agent weights a private ground set, each project
// covers a random part of it, and v_i(S) is the covered fraction of agent
// i's weight. Monotone submodular with values in [0, 1].
CpppInstance RandomCoverageInstance(int m, int k, int agents, Rng& rng);

struct WelfareBound {
  double opt = 0.0;
  int argmax = 0;
  // opt - (k ln m + t) / eps.
  double threshold = 0.0;
  // opt - 2 (ln|R| + t) / eps.
  double conservative_threshold = 0.0;
  std::uint64_t range_size = 0;
};
WelfareBound CpppWelfareBound(const CpppInstance& instance,
                              const PrivacyParams& params, double t);

}  // namespace expmech

#endif  // EXPMECH_CPPP_H_
