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

#include "expmech/permanent.h"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>

#include "expmech/error.h"

namespace expmech {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Orders at or above this use the OpenMP Ryser kernel.
constexpr int kParallelOrder = 14;

// Ryser accumulates in long double; this is its unit roundoff on x86-64.
constexpr double kExtendedEps = static_cast<double>(
    std::numeric_limits<long double>::epsilon());

constexpr double kRyserErrorBudget = 1e-11;

void CheckOrder(const WeightMatrix& m) {
  if (m.order() > kMaxPermanentOrder) {
    throw CapExceeded("permanent order " + std::to_string(m.order()) +
                      " exceeds the exact cap of " +
                      std::to_string(kMaxPermanentOrder));
  }
}

// Linear entries after dividing each row by its maximum, plus the total log
// scale removed. Returns false if some row is entirely zero.
bool RowScaled(const WeightMatrix& m, std::vector<long double>& scaled,
               double& log_scale) {
  const int n = m.order();
  scaled.assign(static_cast<std::size_t>(n) * n, 0.0L);
  log_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    double row_max = kNegInf;
    for (int j = 0; j < n; ++j) row_max = std::max(row_max, m.log_entry(i, j));
    if (row_max == kNegInf) return false;
    log_scale += row_max;
    for (int j = 0; j < n; ++j) {
      scaled[static_cast<std::size_t>(i) * n + j] =
          std::exp(static_cast<long double>(m.log_entry(i, j) - row_max));
    }
  }
  return true;
}

// Compensated running sum of signed Ryser terms over one Gray-code block.
struct RyserPartial {
  long double sum = 0.0L;
  long double carry = 0.0L;
  long double max_term = 0.0L;

  void Add(long double term) {
    const long double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      carry += (sum - t) + term;
    } else {
      carry += (term - t) + sum;
    }
    sum = t;
    max_term = std::max(max_term, std::abs(term));
  }
};

// Sums Ryser terms for Gray-code ranks [first, last).
RyserPartial RyserBlock(const std::vector<long double>& a, int n,
                        std::uint64_t first, std::uint64_t last) {
  RyserPartial partial;
  if (first >= last) return partial;
  std::vector<long double> row_sums(n, 0.0L);
  // Seed the row sums with the subset preceding `first`.
  const std::uint64_t seed = first - 1;
  const std::uint64_t seed_gray = seed ^ (seed >> 1);
  for (int j = 0; j < n; ++j) {
    if ((seed_gray >> j) & 1U) {
      for (int i = 0; i < n; ++i) {
        row_sums[i] += a[static_cast<std::size_t>(i) * n + j];
      }
    }
  }
  for (std::uint64_t g = first; g < last; ++g) {
    const int j = std::countr_zero(g);
    const std::uint64_t gray = g ^ (g >> 1);
    const bool added = (gray >> j) & 1U;
    for (int i = 0; i < n; ++i) {
      const long double e = a[static_cast<std::size_t>(i) * n + j];
      row_sums[i] += added ? e : -e;
    }
    long double prod = 1.0L;
    for (int i = 0; i < n; ++i) prod *= row_sums[i];
    const int subset_size = std::popcount(gray);
    partial.Add(((n - subset_size) & 1) ? -prod : prod);
  }
  return partial;
}

RyserDiagnostics Finish(const RyserPartial& total, double log_scale,
                        std::uint64_t terms, int n) {
  RyserDiagnostics diag;
  const long double value = total.sum + total.carry;
  if (value <= 0.0L) {
    diag.log_permanent = kNegInf;
    diag.cancellation = std::numeric_limits<double>::infinity();
    diag.relative_error_estimate = std::numeric_limits<double>::infinity();
    return diag;
  }
  diag.log_permanent = static_cast<double>(std::log(value)) + log_scale;
  diag.cancellation = static_cast<double>(total.max_term / value);
  diag.relative_error_estimate = diag.cancellation * kExtendedEps * n *
                                 std::sqrt(static_cast<double>(terms));
  return diag;
}

}  // namespace

WeightMatrix::WeightMatrix(int order, std::vector<double> log_entries)
    : order_(order), log_entries_(std::move(log_entries)) {
  if (order_ < 0) throw InputError("matrix order must be non-negative");
  if (log_entries_.size() != static_cast<std::size_t>(order_) * order_) {
    throw InputError("weight matrix has wrong number of entries");
  }
  for (double l : log_entries_) {
    if (std::isnan(l) || l == std::numeric_limits<double>::infinity()) {
      throw InputError("weight matrix entries must be finite and non-negative");
    }
  }
}

WeightMatrix WeightMatrix::FromLinear(int order,
                                      std::span<const double> entries) {
  std::vector<double> logs(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!(entries[k] >= 0.0)) {
      throw InputError("weight matrix entries must be non-negative");
    }
    logs[k] = std::log(entries[k]);
  }
  return WeightMatrix(order, std::move(logs));
}

WeightMatrix WeightMatrix::Submatrix(std::span<const int> rows,
                                     std::span<const int> cols) const {
  if (rows.size() != cols.size()) {
    throw InputError("submatrix must be square");
  }
  const int k = static_cast<int>(rows.size());
  std::vector<double> logs(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      logs[static_cast<std::size_t>(a) * k + b] = log_entry(rows[a], cols[b]);
    }
  }
  return WeightMatrix(k, std::move(logs));
}

WeightMatrix WeightMatrix::WithoutRowCol(int row, int col) const {
  std::vector<int> rows;
  std::vector<int> cols;
  for (int k = 0; k < order_; ++k) {
    if (k != row) rows.push_back(k);
    if (k != col) cols.push_back(k);
  }
  return Submatrix(rows, cols);
}

RyserDiagnostics RyserWithDiagnostics(const WeightMatrix& m, bool parallel) {
  CheckOrder(m);
  const int n = m.order();
  if (n == 0) return {0.0, 1.0, 0.0};
  std::vector<long double> a;
  double log_scale = 0.0;
  if (!RowScaled(m, a, log_scale)) {
    return {kNegInf, std::numeric_limits<double>::infinity(), 0.0};
  }
  const std::uint64_t terms = (std::uint64_t{1} << n) - 1;
  if (!parallel) {
    return Finish(RyserBlock(a, n, 1, terms + 1), log_scale, terms, n);
  }
  // Fixed block layout, combined in order: the result does not depend on
  // the number of threads.
  const int blocks = static_cast<int>(std::min<std::uint64_t>(256, terms));
  std::vector<RyserPartial> partials(blocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < blocks; ++b) {
    const std::uint64_t first = 1 + terms * b / blocks;
    const std::uint64_t last = 1 + terms * (b + 1) / blocks;
    partials[b] = RyserBlock(a, n, first, last);
  }
  RyserPartial total;
  for (const RyserPartial& p : partials) {
    total.Add(p.sum);
    total.Add(p.carry);
    total.max_term = std::max(total.max_term, p.max_term);
  }
  return Finish(total, log_scale, terms, n);
}

double LogPermanentRyserSerial(const WeightMatrix& m) {
  return RyserWithDiagnostics(m, false).log_permanent;
}

double LogPermanentRyserParallel(const WeightMatrix& m) {
  return RyserWithDiagnostics(m, true).log_permanent;
}

double LogPermanentSubsetDp(const WeightMatrix& m) {
  CheckOrder(m);
  const int n = m.order();
  if (n == 0) return 0.0;
  std::vector<long double> a;
  double log_scale = 0.0;
  if (!RowScaled(m, a, log_scale)) return kNegInf;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  // partial[mask]: permanent of rows 0..|mask|-1 restricted to columns mask.
  std::vector<long double> partial(full + 1, 0.0L);
  partial[0] = 1.0L;
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    const long double base = partial[mask];
    if (base == 0.0L) continue;
    const int row = std::popcount(mask);
    for (int j = 0; j < n; ++j) {
      if ((mask >> j) & 1U) continue;
      partial[mask | (std::uint64_t{1} << j)] +=
          base * a[static_cast<std::size_t>(row) * n + j];
    }
  }
  if (partial[full] <= 0.0L) return kNegInf;
  return static_cast<double>(std::log(partial[full])) + log_scale;
}

double LogPermanent(const WeightMatrix& m) {
  const RyserDiagnostics diag =
      RyserWithDiagnostics(m, m.order() >= kParallelOrder);
  if (diag.relative_error_estimate <= kRyserErrorBudget) {
    return diag.log_permanent;
  }
  return LogPermanentSubsetDp(m);
}

double ExactPermanentEstimator::LogPermanent(const WeightMatrix& m,
                                             double /*accuracy*/,
                                             double /*failure_probability*/,
                                             Rng& /*rng*/) const {
  return expmech::LogPermanent(m);
}

double NoisyPermanentEstimator::LogPermanent(const WeightMatrix& m,
                                             double accuracy,
                                             double /*failure_probability*/,
                                             Rng& rng) const {
  if (!(accuracy >= 0.0)) throw InputError("accuracy must be non-negative");
  const double exact = expmech::LogPermanent(m);
  const double u = rng.Uniform();
  return exact + accuracy * (2.0 * u - 1.0);
}

EstimatorSpec ParseEstimator(std::string_view text) {
  EstimatorSpec spec;
  spec.text = std::string(text);
  if (text == "exact") {
    spec.estimator = std::make_shared<ExactPermanentEstimator>();
    return spec;
  }
  constexpr std::string_view kNoisy = "noisy:";
  if (text.starts_with(kNoisy)) {
    const std::string_view rest = text.substr(kNoisy.size());
    double gamma = 0.0;
    const auto [ptr, ec] =
        std::from_chars(rest.data(), rest.data() + rest.size(), gamma);
    if (ec != std::errc() || ptr != rest.data() + rest.size() ||
        !std::isfinite(gamma) || gamma <= 0.0) {
      throw InputError("noisy estimator needs a positive gamma, got '" +
                       std::string(rest) + "'");
    }
    spec.estimator = std::make_shared<NoisyPermanentEstimator>();
    spec.gamma = gamma;
    return spec;
  }
  throw InputError("unknown estimator '" + std::string(text) +
                   "' (expected exact or noisy:<gamma>)");
}

}  // namespace expmech
