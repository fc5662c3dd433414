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

// Laplace noising of payments. In the public model every payment is visible
// to everyone, so each entry gets Lap(n / eps); in the private model each
// agent only sees its own payment and Lap(1 / eps) suffices.

#ifndef EXPMECH_PAYMENT_PRIVACY_H_
#define EXPMECH_PAYMENT_PRIVACY_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expmech/rng.h"
#include "expmech/valuation.h"
#include "expmech/verification.h"

namespace expmech {

enum class NoiseModel { kNone, kPublic, kPrivate };

// Accepts "none", "public", "private"; throws InputError otherwise.
NoiseModel ParseNoiseModel(std::string_view text);
std::string NoiseModelName(NoiseModel model);

// Inverse-CDF draw from the density exp(-|x| / b) / (2b). One uniform per
// call; scale 0 returns 0.
double LaplaceSample(double scale, Rng& rng);
double LaplaceLogDensity(double x, double scale);

// n / eps, 1 / eps, or 0 for kNone.
double NoiseScale(NoiseModel model, double epsilon, int agents);

struct NoisedPayments {
  std::vector<double> noised;
  NoiseModel model = NoiseModel::kNone;
  double scale = 0.0;
  double epsilon = 0.0;
  // 2 b^2.
  double entry_variance = 0.0;
  double total_variance = 0.0;
  double total_variance_sqrt = 0.0;
};
NoisedPayments NoisePayments(std::span<const double> payments,
                             NoiseModel model, double epsilon, Rng& rng);

// Largest |ln f(x) - ln f(x + s)| of the implemented density over a grid of
// x and shifts s in [-sensitivity, sensitivity].
double MaxShiftLogDensityRatio(double scale, double sensitivity,
                               int grid_points);

// Over one-agent row swaps from `swaps`, every payment moves by at most
// 1 + 1e-9 and stays within the value domain (prices in [-1, 0] for cost
// profiles).
CheckReport CheckPaymentSensitivity(const ValuationProfile& profile,
                                    const Mechanism& mechanism,
                                    const RowGenerator& swaps, Rng& rng);
// Random rows plus the all-low and all-high rows for each agent.
CheckReport CheckPaymentSensitivity(const ValuationProfile& profile,
                                    const Mechanism& mechanism,
                                    int swap_count, Rng& rng);

// `base` with payments replaced by the mean of `draws` noised copies. The
// noise stream is keyed by the bids so evaluations are reproducible.
Mechanism NoisedMechanism(const Mechanism& base, NoiseModel model,
                          double epsilon, int draws, std::uint64_t seed);

// Standard deviation of one averaged noised payment.
double NoisedPaymentStandardError(NoiseModel model, double epsilon,
                                  int agents, int draws);

}  // namespace expmech

#endif  // EXPMECH_PAYMENT_PRIVACY_H_
