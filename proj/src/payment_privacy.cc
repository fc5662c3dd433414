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

#include "expmech/payment_privacy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "expmech/error.h"

namespace expmech {

NoiseModel ParseNoiseModel(std::string_view text) {
  if (text == "none") return NoiseModel::kNone;
  if (text == "public") return NoiseModel::kPublic;
  if (text == "private") return NoiseModel::kPrivate;
  throw InputError("unknown payment noise model '" + std::string(text) +
                   "' (expected none, public or private)");
}

std::string NoiseModelName(NoiseModel model) {
  switch (model) {
    case NoiseModel::kNone:
      return "none";
    case NoiseModel::kPublic:
      return "public";
    case NoiseModel::kPrivate:
      return "private";
  }
  return "none";
}

double LaplaceSample(double scale, Rng& rng) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InputError("Laplace scale must be finite and nonnegative");
  }
  const double u = rng.UniformOpen() - 0.5;
  if (scale == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

double LaplaceLogDensity(double x, double scale) {
  if (!(scale > 0.0)) throw InputError("Laplace scale must be positive");
  return -std::abs(x) / scale - std::log(2.0 * scale);
}

double NoiseScale(NoiseModel model, double epsilon, int agents) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("epsilon must be finite and positive");
  }
  switch (model) {
    case NoiseModel::kNone:
      return 0.0;
    case NoiseModel::kPublic:
      return agents / epsilon;
    case NoiseModel::kPrivate:
      return 1.0 / epsilon;
  }
  return 0.0;
}

NoisedPayments NoisePayments(std::span<const double> payments,
                             NoiseModel model, double epsilon, Rng& rng) {
  NoisedPayments out;
  out.model = model;
  out.epsilon = epsilon;
  out.scale = NoiseScale(model, epsilon, static_cast<int>(payments.size()));
  out.entry_variance = 2.0 * out.scale * out.scale;
  out.total_variance = out.entry_variance * payments.size();
  out.total_variance_sqrt = std::sqrt(out.total_variance);
  out.noised.reserve(payments.size());
  for (double p : payments) {
    if (!std::isfinite(p)) throw InputError("payment is not finite");
    out.noised.push_back(p + (model == NoiseModel::kNone
                                  ? 0.0
                                  : LaplaceSample(out.scale, rng)));
  }
  return out;
}

double MaxShiftLogDensityRatio(double scale, double sensitivity,
                               int grid_points) {
  if (grid_points < 2) throw InputError("grid needs at least two points");
  double worst = 0.0;
  const double span = 4.0 * scale + 2.0 * sensitivity;
  for (int a = 0; a < grid_points; ++a) {
    const double x = -span + 2.0 * span * a / (grid_points - 1);
    for (int b = 0; b < grid_points; ++b) {
      const double s = -sensitivity + 2.0 * sensitivity * b / (grid_points - 1);
      worst = std::max(worst, std::abs(LaplaceLogDensity(x, scale) -
                                       LaplaceLogDensity(x + s, scale)));
    }
  }
  return worst;
}

CheckReport CheckPaymentSensitivity(const ValuationProfile& profile,
                                    const Mechanism& mechanism,
                                    const RowGenerator& swaps, Rng& rng) {
  CheckReport report;
  report.check_name = "sensitivity";
  report.tolerance = kMarginTolerance;
  const double low = DomainLow(profile.domain());
  const double high = DomainHigh(profile.domain());
  double worst = std::numeric_limits<double>::infinity();
  auto consider = [&](double margin, const std::string& what) {
    if (margin < worst) {
      worst = margin;
      report.witness = what;
    }
  };
  auto check_range = [&](const std::vector<double>& payments,
                         const std::string& where) {
    for (std::size_t j = 0; j < payments.size(); ++j) {
      const double p = payments[j];
      std::ostringstream what;
      what << where << ": payment of agent " << j << " is " << p;
      consider(std::min(p - low, high - p), what.str());
    }
  };
  const MechanismEvaluation base = mechanism.evaluate(profile);
  check_range(base.payments, "reported profile");
  double largest_change = 0.0;
  for (int i = 0; i < profile.agents(); ++i) {
    for (const std::vector<double>& row : swaps(i, profile, rng)) {
      const ValuationProfile neighbour = profile.WithRow(i, row);
      const MechanismEvaluation other = mechanism.evaluate(neighbour);
      ++report.samples_used;
      std::ostringstream where;
      where << "agent " << i << " swapped row";
      check_range(other.payments, where.str());
      for (std::size_t j = 0; j < other.payments.size(); ++j) {
        const double change = std::abs(other.payments[j] - base.payments[j]);
        largest_change = std::max(largest_change, change);
        std::ostringstream what;
        what << "agent " << i << " swap moves payment " << j << " by "
             << change;
        consider(1.0 - change, what.str());
      }
    }
  }
  report.worst_case_margin = worst;
  report.notes.emplace_back("largest_change", largest_change);
  report.Decide();
  if (report.passed) report.witness.reset();
  return report;
}

CheckReport CheckPaymentSensitivity(const ValuationProfile& profile,
                                    const Mechanism& mechanism,
                                    int swap_count, Rng& rng) {
  return CheckPaymentSensitivity(
      profile, mechanism,
      RandomRows(IdentityEmbedding(profile.outcomes(), profile.domain()),
                 swap_count, /*include_extremal=*/true),
      rng);
}

Mechanism NoisedMechanism(const Mechanism& base, NoiseModel model,
                          double epsilon, int draws, std::uint64_t seed) {
  if (draws < 1) throw InputError("noised mechanism needs at least one draw");
  return {base.name + "+noise:" + NoiseModelName(model),
          [base, model, epsilon, draws, seed](const ValuationProfile& bids) {
            MechanismEvaluation eval = base.evaluate(bids);
            Rng rng = Rng::Stream(seed, bids.Fingerprint());
            std::vector<double> sum(eval.payments.size(), 0.0);
            for (int d = 0; d < draws; ++d) {
              const NoisedPayments noised =
                  NoisePayments(eval.payments, model, epsilon, rng);
              for (std::size_t j = 0; j < sum.size(); ++j) {
                sum[j] += noised.noised[j];
              }
            }
            for (std::size_t j = 0; j < sum.size(); ++j) {
              eval.payments[j] = sum[j] / draws;
            }
            return eval;
          }};
}

double NoisedPaymentStandardError(NoiseModel model, double epsilon,
                                  int agents, int draws) {
  const double b = NoiseScale(model, epsilon, agents);
  return std::sqrt(2.0 * b * b / draws);
}

}  // namespace expmech
