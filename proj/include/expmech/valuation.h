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

#ifndef EXPMECH_VALUATION_H_
#define EXPMECH_VALUATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace expmech {

// Sign convention of a valuation table. Forward auctions carry values in
// [0, 1]; procurement (reverse) auctions carry negated costs in [-1, 0].
enum class ValueDomain { kValues, kCosts };

// Lower and upper end of the admissible entry range for a domain.
double DomainLow(ValueDomain domain);
double DomainHigh(ValueDomain domain);

// n agents' reported valuations over an explicit finite range R, stored
// row-major (one row per agent). Welfare of outcome r is the column sum.
class ValuationProfile {
 public:
  // Throws InputError on shape mismatch, non-finite entries, or entries
  // outside the domain range.
  ValuationProfile(int agents, int outcomes, std::vector<double> values,
                   ValueDomain domain = ValueDomain::kValues,
                   std::vector<std::string> labels = {});

  static ValuationProfile FromRows(
      const std::vector<std::vector<double>>& rows,
      ValueDomain domain = ValueDomain::kValues,
      std::vector<std::string> labels = {});

  // All-zero profile.
  static ValuationProfile Zero(int agents, int outcomes,
                               ValueDomain domain = ValueDomain::kValues);

  int agents() const { return agents_; }
  int outcomes() const { return outcomes_; }
  ValueDomain domain() const { return domain_; }
  const std::vector<std::string>& labels() const { return labels_; }

  double value(int agent, int outcome) const {
    return values_[static_cast<std::size_t>(agent) * outcomes_ + outcome];
  }
  std::span<const double> row(int agent) const {
    return {values_.data() + static_cast<std::size_t>(agent) * outcomes_,
            static_cast<std::size_t>(outcomes_)};
  }
  const std::vector<double>& values() const { return values_; }

  // sum_i v_i(r). Agents are summed in index order.
  double Welfare(int outcome) const;
  // sum_{k != agent} v_k(r), same summation order as Welfare.
  double WelfareExcluding(int outcome, int agent) const;
  std::vector<double> WelfareVector() const;

  // True when every entry of the agent's row is zero.
  bool IsZeroRow(int agent) const;

  // Hash of the shape and table bits; seeds per-profile random streams.
  std::uint64_t Fingerprint() const;

  // Copy with one agent's row replaced (validated).
  ValuationProfile WithRow(int agent, std::span<const double> row) const;

  bool operator==(const ValuationProfile&) const = default;

 private:
  int agents_;
  int outcomes_;
  std::vector<double> values_;
  ValueDomain domain_;
  std::vector<std::string> labels_;
};

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 0.0;
  // Incentive-compatibility slack granted to approximate implementations.
  double gamma = 0.0;

  // epsilon finite and > 0, delta in [0, 1), gamma finite and >= 0.
  void Validate() const;
};

// Prior mu over the range for the generalized mechanism. Every outcome must
// carry positive mass.
class PriorDistribution {
 public:
  explicit PriorDistribution(std::vector<double> mu);
  static PriorDistribution Uniform(int outcomes);

  int size() const { return static_cast<int>(mu_.size()); }
  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& log_mu() const { return log_mu_; }

 private:
  std::vector<double> mu_;
  std::vector<double> log_mu_;
};

}  // namespace expmech

#endif  // EXPMECH_VALUATION_H_
