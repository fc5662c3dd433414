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

#include "expmech/cppp.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expmech/error.h"

namespace expmech {
namespace {

void CheckShape(int m, int k) {
  if (m < 1) throw InputError("public project instance needs m >= 1");
  if (m > kMaxProjects) {
    throw CapExceeded("at most " + std::to_string(kMaxProjects) +
                      " projects are supported");
  }
  if (k < 0 || k > m) throw InputError("size cap k must lie in [0, m]");
}

std::uint64_t Mask(const ProjectSet& set) {
  std::uint64_t mask = 0;
  for (int p : set) mask |= std::uint64_t{1} << p;
  return mask;
}

}  // namespace

std::uint64_t CpppRangeSize(int m, int k) {
  CheckShape(m, k);
  std::uint64_t total = 0;
  std::uint64_t binom = 1;
  for (int s = 0; s <= k; ++s) {
    total += binom;
    if (total > kMaxCpppRange) {
      throw CapExceeded("range of subsets of size <= " + std::to_string(k) +
                        " of " + std::to_string(m) + " projects exceeds " +
                        std::to_string(kMaxCpppRange) + " outcomes");
    }
    // C(m, s + 1) = C(m, s) (m - s) / (s + 1), exact in this order.
    binom = binom * (m - s) / (s + 1);
  }
  return total;
}

std::vector<ProjectSet> EnumerateRange(int m, int k) {
  const std::uint64_t total = CpppRangeSize(m, k);
  std::vector<ProjectSet> out;
  out.reserve(total);
  out.emplace_back();
  for (int s = 1; s <= k; ++s) {
    ProjectSet pick(s);
    for (int i = 0; i < s; ++i) pick[i] = i;
    while (true) {
      out.push_back(pick);
      int i = s - 1;
      while (i >= 0 && pick[i] == m - s + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < s; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

std::string ProjectSetLabel(const ProjectSet& set) {
  std::string label = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i > 0) label += ",";
    label += std::to_string(set[i]);
  }
  return label + "}";
}

SubsetIndexer::SubsetIndexer(int m, int k)
    : m_(m), k_(k), subsets_(EnumerateRange(m, k)) {
  index_.reserve(subsets_.size());
  for (std::size_t i = 0; i < subsets_.size(); ++i) {
    index_.emplace(Mask(subsets_[i]), static_cast<int>(i));
  }
}

int SubsetIndexer::Index(const ProjectSet& set) const {
  if (static_cast<int>(set.size()) > k_) {
    throw InputError("subset " + ProjectSetLabel(set) + " exceeds size cap " +
                     std::to_string(k_));
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] < 0 || set[i] >= m_ || (i > 0 && set[i] <= set[i - 1])) {
      throw InputError("subset " + ProjectSetLabel(set) +
                       " is not a sorted set of project indices");
    }
  }
  return index_.at(Mask(set));
}

CpppInstance::CpppInstance(int m, int k, int agents, std::vector<double> values)
    : m_(m), k_(k), agents_(agents), values_(std::move(values)) {
  range_size_ = static_cast<int>(CpppRangeSize(m, k));
  if (agents_ < 1) throw InputError("public project instance needs agents");
  if (values_.size() != static_cast<std::size_t>(agents_) * range_size_) {
    std::ostringstream msg;
    msg << "valuation table has " << values_.size() << " entries, expected "
        << agents_ << " x " << range_size_;
    throw InputError(msg.str());
  }
  const std::vector<ProjectSet> subsets = EnumerateRange(m, k);
  for (int i = 0; i < agents_; ++i) {
    for (int r = 0; r < range_size_; ++r) {
      const double v = value(i, r);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        std::ostringstream msg;
        msg << "agent " << i << " values subset " << ProjectSetLabel(subsets[r])
            << " at " << v << ", outside [0, 1]";
        throw InputError(msg.str());
      }
    }
  }
}

CpppInstance CpppInstance::FromCallback(int m, int k, int agents,
                                        const SetValuation& valuation) {
  const std::vector<ProjectSet> subsets = EnumerateRange(m, k);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(agents) * subsets.size());
  for (int i = 0; i < agents; ++i) {
    for (const ProjectSet& s : subsets) values.push_back(valuation(i, s));
  }
  return CpppInstance(m, k, agents, std::move(values));
}

ValuationProfile ToExplicitProfile(const CpppInstance& instance) {
  std::vector<std::string> labels;
  for (const ProjectSet& s :
       EnumerateRange(instance.projects(), instance.max_size())) {
    labels.push_back(ProjectSetLabel(s));
  }
  return ValuationProfile(instance.agents(), instance.range_size(),
                          instance.values(), ValueDomain::kValues,
                          std::move(labels));
}

CpppInstance RandomCoverageInstance(int m, int k, int agents, Rng& rng) {
  constexpr int kGroundSet = 8;
  // weight[i][g], covers[i][p] is a bitmask over agent i's ground set.
  std::vector<std::vector<double>> weight(agents,
                                          std::vector<double>(kGroundSet));
  std::vector<std::vector<unsigned>> covers(agents, std::vector<unsigned>(m));
  for (int i = 0; i < agents; ++i) {
    double total = 0.0;
    for (double& w : weight[i]) {
      w = rng.Exponential();
      total += w;
    }
    for (double& w : weight[i]) w /= total;
    for (int p = 0; p < m; ++p) {
      unsigned mask = 0;
      for (int g = 0; g < kGroundSet; ++g) {
        if (rng.Uniform() < 0.3) mask |= 1u << g;
      }
      covers[i][p] = mask;
    }
  }
  return CpppInstance::FromCallback(
      m, k, agents, [&](int agent, const ProjectSet& set) {
        unsigned covered = 0;
        for (int p : set) covered |= covers[agent][p];
        double v = 0.0;
        for (int g = 0; g < kGroundSet; ++g) {
          if (covered & (1u << g)) v += weight[agent][g];
        }
        return std::min(v, 1.0);
      });
}

WelfareBound CpppWelfareBound(const CpppInstance& instance,
                              const PrivacyParams& params, double t) {
  params.Validate();
  WelfareBound bound;
  bound.range_size = instance.range_size();
  bound.opt = -1.0;
  for (int r = 0; r < instance.range_size(); ++r) {
    double w = 0.0;
    for (int i = 0; i < instance.agents(); ++i) w += instance.value(i, r);
    if (w > bound.opt) {
      bound.opt = w;
      bound.argmax = r;
    }
  }
  const double eps = params.epsilon;
  bound.threshold =
      bound.opt -
      (instance.max_size() * std::log(static_cast<double>(instance.projects())) +
       t) / eps;
  bound.conservative_threshold =
      bound.opt -
      2.0 * (std::log(static_cast<double>(bound.range_size)) + t) / eps;
  return bound;
}

}  // namespace expmech
