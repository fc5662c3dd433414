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

// Data-parallel numeric kernels. Each kernel has a serial reference and an
// OpenMP version; the parallel versions split the input into a fixed number
// of blocks and combine block results in order, so their output does not
// depend on the thread count.

#ifndef EXPMECH_KERNELS_H_
#define EXPMECH_KERNELS_H_

#include <cstddef>
#include <span>

namespace expmech::kernels {

// Inputs at or above this size go to the OpenMP kernels.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;

// ln(sum_i exp(x_i)) with max shifting. Entries may be -inf; an empty input
// or an all -inf input yields -inf.
double LogSumExpSerial(std::span<const double> x);
double LogSumExpParallel(std::span<const double> x);
double LogSumExp(std::span<const double> x);

// sum_i exp(x_i - shift) * f_i, the weighted companion of LogSumExp used for
// expectations under a log-weighted measure.
double ShiftedWeightedSumSerial(std::span<const double> log_weights,
                                std::span<const double> f, double shift);
double ShiftedWeightedSumParallel(std::span<const double> log_weights,
                                  std::span<const double> f, double shift);
double ShiftedWeightedSum(std::span<const double> log_weights,
                          std::span<const double> f, double shift);

}  // namespace expmech::kernels

#endif  // EXPMECH_KERNELS_H_
