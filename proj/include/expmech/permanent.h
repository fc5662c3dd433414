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

#ifndef EXPMECH_PERMANENT_H_
#define EXPMECH_PERMANENT_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expmech/rng.h"

namespace expmech {

// Largest order accepted by the exact permanent routines (2^n * n work).
inline constexpr int kMaxPermanentOrder = 20;

// Square non-negative matrix held as the logarithms of its entries. A zero
// entry is stored as -inf.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(int order, std::vector<double> log_entries);

  // Builds the matrix from linear-scale non-negative entries.
  static WeightMatrix FromLinear(int order, std::span<const double> entries);

  int order() const { return order_; }
  double log_entry(int row, int col) const {
    return log_entries_[static_cast<std::size_t>(row) * order_ + col];
  }
  const std::vector<double>& log_entries() const { return log_entries_; }

  WeightMatrix Submatrix(std::span<const int> rows,
                         std::span<const int> cols) const;
  WeightMatrix WithoutRowCol(int row, int col) const;

 private:
  int order_ = 0;
  std::vector<double> log_entries_;
};

// ln perm(A) by Ryser's inclusion-exclusion over column subsets, visited in
// Gray-code order. Rows are rescaled by their largest entry and the signed
// terms are accumulated in extended precision with compensation.
double LogPermanentRyserSerial(const WeightMatrix& m);
double LogPermanentRyserParallel(const WeightMatrix& m);

// ln perm(A) by dynamic programming over column subsets. Every partial sum is
// non-negative, so nothing cancels. 2^n doubles of memory.
double LogPermanentSubsetDp(const WeightMatrix& m);

// Relative error estimate of a Ryser evaluation: the largest |term| over the
// result, scaled by extended-precision rounding. Exposed for diagnostics.
struct RyserDiagnostics {
  double log_permanent = 0.0;
  double cancellation = 1.0;  // max |term| / |sum|
  double relative_error_estimate = 0.0;
};
RyserDiagnostics RyserWithDiagnostics(const WeightMatrix& m, bool parallel);

// Exact ln perm(A): Ryser (OpenMP above a small order), falling back to the
// subset recursion when cancellation would cost more than ~1e-11 relative
// accuracy. Throws CapExceeded above kMaxPermanentOrder.
double LogPermanent(const WeightMatrix& m);

// Source of permanent estimates for the matching sampler and payments. The
// contract: |result - ln perm(m)| <= accuracy with probability at least
// 1 - failure_probability.
class PermanentEstimator {
 public:
  virtual ~PermanentEstimator() = default;
  virtual double LogPermanent(const WeightMatrix& m, double accuracy,
                              double failure_probability, Rng& rng) const = 0;
  virtual std::string name() const = 0;
  virtual bool is_exact() const = 0;
};

// Wraps the exact routine; meets the contract trivially.
class ExactPermanentEstimator final : public PermanentEstimator {
 public:
  double LogPermanent(const WeightMatrix& m, double accuracy,
                      double failure_probability, Rng& rng) const override;
  std::string name() const override { return "exact"; }
  bool is_exact() const override { return true; }
};

// Exact value perturbed by Uniform(-accuracy, accuracy) in the log domain: a
// worst-case stand-in for a randomized approximation scheme, used to
// exercise gamma-IC accounting.
class NoisyPermanentEstimator final : public PermanentEstimator {
 public:
  double LogPermanent(const WeightMatrix& m, double accuracy,
                      double failure_probability, Rng& rng) const override;
  std::string name() const override { return "noisy"; }
  bool is_exact() const override { return false; }
};

// Parses "exact" or "noisy:<gamma>". The gamma of a noisy spec is returned
// alongside the estimator.
struct EstimatorSpec {
  std::shared_ptr<const PermanentEstimator> estimator;
  std::optional<double> gamma;
  std::string text;
};
EstimatorSpec ParseEstimator(std::string_view text);

}  // namespace expmech

#endif  // EXPMECH_PERMANENT_H_
