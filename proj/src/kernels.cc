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

#include "expmech/kernels.h"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace expmech::kernels {
namespace {

constexpr int kBlocks = 64;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BlockRange {
  std::size_t begin;
  std::size_t end;
};

BlockRange Block(std::size_t n, int b) {
  return {n * b / kBlocks, n * (b + 1) / kBlocks};
}

}  // namespace

double LogSumExpSerial(std::span<const double> x) {
  double mx = kNegInf;
  for (double v : x) mx = std::max(mx, v);
  if (mx == kNegInf) return kNegInf;
  if (std::isinf(mx)) return mx;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - mx);
  return mx + std::log(sum);
}

double LogSumExpParallel(std::span<const double> x) {
  const std::size_t n = x.size();
  std::array<double, kBlocks> block_max;
  block_max.fill(kNegInf);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < kBlocks; ++b) {
    const auto [lo, hi] = Block(n, b);
    double m = kNegInf;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, x[i]);
    block_max[b] = m;
  }
  const double mx = *std::max_element(block_max.begin(), block_max.end());
  if (mx == kNegInf) return kNegInf;
  if (std::isinf(mx)) return mx;

  std::array<double, kBlocks> block_sum{};
#pragma omp parallel for schedule(static)
  for (int b = 0; b < kBlocks; ++b) {
    const auto [lo, hi] = Block(n, b);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::exp(x[i] - mx);
    block_sum[b] = s;
  }
  double sum = 0.0;
  for (double s : block_sum) sum += s;
  return mx + std::log(sum);
}

double LogSumExp(std::span<const double> x) {
  return x.size() >= kParallelThreshold ? LogSumExpParallel(x)
                                        : LogSumExpSerial(x);
}

double ShiftedWeightedSumSerial(std::span<const double> log_weights,
                                std::span<const double> f, double shift) {
  double sum = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    sum += std::exp(log_weights[i] - shift) * f[i];
  }
  return sum;
}

double ShiftedWeightedSumParallel(std::span<const double> log_weights,
                                  std::span<const double> f, double shift) {
  const std::size_t n = log_weights.size();
  std::array<double, kBlocks> block_sum{};
#pragma omp parallel for schedule(static)
  for (int b = 0; b < kBlocks; ++b) {
    const auto [lo, hi] = Block(n, b);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      s += std::exp(log_weights[i] - shift) * f[i];
    }
    block_sum[b] = s;
  }
  double sum = 0.0;
  for (double s : block_sum) sum += s;
  return sum;
}

double ShiftedWeightedSum(std::span<const double> log_weights,
                          std::span<const double> f, double shift) {
  return log_weights.size() >= kParallelThreshold
             ? ShiftedWeightedSumParallel(log_weights, f, shift)
             : ShiftedWeightedSumSerial(log_weights, f, shift);
}

}  // namespace expmech::kernels
