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

#include "expmech/valuation.h"

#include <bit>
#include <cmath>
#include <sstream>
#include <utility>

#include "expmech/error.h"
#include "expmech/rng.h"

namespace expmech {

double DomainLow(ValueDomain domain) {
  return domain == ValueDomain::kValues ? 0.0 : -1.0;
}

double DomainHigh(ValueDomain domain) {
  return domain == ValueDomain::kValues ? 1.0 : 0.0;
}

ValuationProfile::ValuationProfile(int agents, int outcomes,
                                   std::vector<double> values,
                                   ValueDomain domain,
                                   std::vector<std::string> labels)
    : agents_(agents),
      outcomes_(outcomes),
      values_(std::move(values)),
      domain_(domain),
      labels_(std::move(labels)) {
  if (agents_ < 1) throw InputError("profile needs at least one agent");
  if (outcomes_ < 1) throw InputError("profile needs at least one outcome");
  if (values_.size() != static_cast<std::size_t>(agents_) * outcomes_) {
    throw InputError("profile value table has wrong size");
  }
  if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(outcomes_)) {
    throw InputError("outcome label count does not match range size");
  }
  const double lo = DomainLow(domain_);
  const double hi = DomainHigh(domain_);
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    const double v = values_[idx];
    if (!std::isfinite(v) || v < lo || v > hi) {
      std::ostringstream msg;
      msg << "valuation of agent " << idx / outcomes_ << " for outcome "
          << idx % outcomes_ << " is " << v << ", outside [" << lo << ", "
          << hi << "]";
      throw InputError(msg.str());
    }
  }
}

ValuationProfile ValuationProfile::FromRows(
    const std::vector<std::vector<double>>& rows, ValueDomain domain,
    std::vector<std::string> labels) {
  if (rows.empty()) throw InputError("profile needs at least one agent");
  const std::size_t width = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * width);
  for (const auto& row : rows) {
    if (row.size() != width) throw InputError("profile rows are ragged");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return ValuationProfile(static_cast<int>(rows.size()),
                          static_cast<int>(width), std::move(flat), domain,
                          std::move(labels));
}

ValuationProfile ValuationProfile::Zero(int agents, int outcomes,
                                        ValueDomain domain) {
  return ValuationProfile(
      agents, outcomes,
      std::vector<double>(static_cast<std::size_t>(agents) * outcomes, 0.0),
      domain);
}

double ValuationProfile::Welfare(int outcome) const {
  double w = 0.0;
  for (int i = 0; i < agents_; ++i) w += value(i, outcome);
  return w;
}

double ValuationProfile::WelfareExcluding(int outcome, int agent) const {
  double w = 0.0;
  for (int i = 0; i < agents_; ++i) {
    if (i != agent) w += value(i, outcome);
  }
  return w;
}

std::vector<double> ValuationProfile::WelfareVector() const {
  std::vector<double> w(outcomes_);
  for (int r = 0; r < outcomes_; ++r) w[r] = Welfare(r);
  return w;
}

std::uint64_t ValuationProfile::Fingerprint() const {
  std::uint64_t h = MixSeed(static_cast<std::uint64_t>(agents_) << 32 |
                            static_cast<std::uint64_t>(outcomes_));
  for (double v : values_) h = MixSeed(h ^ std::bit_cast<std::uint64_t>(v));
  return h;
}

bool ValuationProfile::IsZeroRow(int agent) const {
  for (double v : row(agent)) {
    if (v != 0.0) return false;
  }
  return true;
}

ValuationProfile ValuationProfile::WithRow(int agent,
                                           std::span<const double> row) const {
  if (agent < 0 || agent >= agents_) throw InputError("agent index out of range");
  if (row.size() != static_cast<std::size_t>(outcomes_)) {
    throw InputError("replacement row has wrong length");
  }
  std::vector<double> values = values_;
  std::copy(row.begin(), row.end(),
            values.begin() + static_cast<std::ptrdiff_t>(agent) * outcomes_);
  return ValuationProfile(agents_, outcomes_, std::move(values), domain_,
                          labels_);
}

void PrivacyParams::Validate() const {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw InputError("epsilon must be finite and strictly positive");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw InputError("delta must lie in [0, 1)");
  }
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw InputError("gamma must be finite and non-negative");
  }
}

PriorDistribution::PriorDistribution(std::vector<double> mu)
    : mu_(std::move(mu)) {
  if (mu_.empty()) throw InputError("prior must cover at least one outcome");
  // Neumaier summation so that large uniform priors still sum to 1.
  double total = 0.0;
  double carry = 0.0;
  for (std::size_t r = 0; r < mu_.size(); ++r) {
    const double m = mu_[r];
    if (!std::isfinite(m) || m <= 0.0) {
      throw InputError("prior mass of outcome " + std::to_string(r) +
                       " must be strictly positive");
    }
    const double t = total + m;
    carry += std::abs(total) >= m ? (total - t) + m : (m - t) + total;
    total = t;
  }
  total += carry;
  if (std::abs(total - 1.0) > 1e-12) {
    throw InputError("prior masses must sum to 1");
  }
  log_mu_.resize(mu_.size());
  for (std::size_t r = 0; r < mu_.size(); ++r) log_mu_[r] = std::log(mu_[r]);
}

PriorDistribution PriorDistribution::Uniform(int outcomes) {
  if (outcomes < 1) throw InputError("prior must cover at least one outcome");
  return PriorDistribution(std::vector<double>(outcomes, 1.0 / outcomes));
}

}  // namespace expmech
