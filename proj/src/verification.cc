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

#include "expmech/verification.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>

#include "expmech/error.h"

namespace expmech {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string FormatRow(std::span<const double> row) {
  std::ostringstream out;
  out << "[";
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k > 0) out << ", ";
    out << row[k];
  }
  out << "]";
  return out.str();
}

MechanismEvaluation EvaluateExact(const ValuationProfile& bids,
                                  const PrivacyParams& params,
                                  const PriorDistribution* prior) {
  const OutcomeDistribution dist = GibbsDistribution(bids, params, prior);
  MechanismEvaluation eval;
  eval.payments = Payments(bids, params, dist, prior);
  eval.log_probs = dist.LogProbs();
  eval.probs = dist.probs;
  return eval;
}

std::vector<double> RandomSimplexPoint(int size, Rng& rng) {
  std::vector<double> nu(size);
  double total = 0.0;
  for (double& x : nu) {
    x = rng.Exponential();
    total += x;
  }
  for (double& x : nu) x /= total;
  return nu;
}

// Runs body(k) for k in [0, count), in parallel when requested, and
// rethrows the first exception raised by any iteration.
template <typename Body>
void ForEach(std::int64_t count, bool parallel, Body body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      body(k);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

CheckReport IcSweep(const ValuationProfile& truth, const PrivacyParams& params,
                    const Mechanism& mechanism, const RowGenerator& deviations,
                    std::uint64_t seed, bool parallel) {
  params.Validate();
  const int n = truth.agents();
  const MechanismEvaluation truthful = mechanism.evaluate(truth);

  struct Task {
    int agent;
    std::vector<double> row;
  };
  std::vector<Task> tasks;
  std::vector<double> truthful_utility(n);
  for (int i = 0; i < n; ++i) {
    truthful_utility[i] = ExpectedUtility(truthful, truth.row(i), i);
    Rng rng = Rng::Stream(seed, static_cast<std::uint64_t>(i));
    for (auto& row : deviations(i, truth, rng)) {
      tasks.push_back({i, std::move(row)});
    }
  }

  std::vector<double> margins(tasks.size());
  ForEach(static_cast<std::int64_t>(tasks.size()), parallel,
          [&](std::int64_t k) {
            const Task& task = tasks[k];
            const MechanismEvaluation deviated =
                mechanism.evaluate(truth.WithRow(task.agent, task.row));
            margins[k] = truthful_utility[task.agent] -
                         ExpectedUtility(deviated, truth.row(task.agent),
                                         task.agent);
          });

  CheckReport report;
  report.check_name = "ic";
  report.tolerance = params.gamma + kMarginTolerance;
  report.samples_used = tasks.size();
  report.worst_case_margin = kInf;
  std::size_t worst = 0;
  for (std::size_t k = 0; k < margins.size(); ++k) {
    if (margins[k] < report.worst_case_margin) {
      report.worst_case_margin = margins[k];
      worst = k;
    }
  }
  if (tasks.empty()) report.worst_case_margin = 0.0;
  report.Decide();
  if (!report.passed) {
    std::ostringstream w;
    w << "agent " << tasks[worst].agent << " (true row "
      << FormatRow(truth.row(tasks[worst].agent)) << ") gains "
      << -margins[worst] << " by bidding " << FormatRow(tasks[worst].row)
      << " under mechanism '" << mechanism.name << "'";
    report.witness = w.str();
  }
  report.notes.emplace_back("gamma", params.gamma);
  return report;
}

CheckReport ObjectiveSweep(const ValuationProfile& profile,
                           const PrivacyParams& params,
                           const PriorDistribution* prior, int trials,
                           Rng& rng, const char* name) {
  const OutcomeDistribution gibbs = GibbsDistribution(profile, params, prior);
  const double best = FreeSocialWelfare(gibbs, profile, params, prior);
  const int size = profile.outcomes();

  CheckReport report;
  report.check_name = name;
  report.tolerance = kMarginTolerance;
  report.worst_case_margin = kInf;
  auto consider = [&](const std::vector<double>& nu, const char* label) {
    const double margin =
        best - FreeSocialWelfare(nu, profile, params, prior);
    ++report.samples_used;
    if (margin < report.worst_case_margin) {
      report.worst_case_margin = margin;
      if (margin < -report.tolerance) {
        report.witness = std::string(label) + " distribution " +
                         FormatRow(nu) + " beats the Gibbs law by " +
                         std::to_string(-margin);
      }
    }
  };

  for (int k = 0; k < trials; ++k) consider(RandomSimplexPoint(size, rng), "random");

  for (int r = 0; r < size; ++r) {
    for (double shift : {0.01, -0.01}) {
      std::vector<double> nu = gibbs.probs;
      nu[r] = std::max(0.0, nu[r] + shift);
      double total = 0.0;
      for (double x : nu) total += x;
      for (double& x : nu) x /= total;
      consider(nu, "perturbed");
    }
  }

  consider(std::vector<double>(size, 1.0 / size), "uniform");
  std::vector<double> point(size, 0.0);
  const std::vector<double> welfare = profile.WelfareVector();
  point[std::max_element(welfare.begin(), welfare.end()) - welfare.begin()] = 1.0;
  consider(point, "argmax point-mass");

  report.Decide();
  report.notes.emplace_back("gibbs_objective", best);
  return report;
}

}  // namespace

double MechanismEvaluation::LogProb(int r) const {
  return log_probs.empty() ? std::log(probs[r]) : log_probs[r];
}

double ExpectedUtility(const MechanismEvaluation& evaluation,
                       std::span<const double> truth_row, int agent) {
  double value = 0.0;
  for (std::size_t r = 0; r < truth_row.size(); ++r) {
    if (evaluation.probs[r] > 0.0) value += evaluation.probs[r] * truth_row[r];
  }
  return value - evaluation.payments[agent];
}

Mechanism ExactMechanism(const PrivacyParams& params,
                         std::optional<PriorDistribution> prior) {
  return {prior ? "exact-prior" : "exact",
          [params, prior](const ValuationProfile& bids) {
            return EvaluateExact(bids, params, prior ? &*prior : nullptr);
          }};
}

Mechanism AllocationOnlyMechanism(const PrivacyParams& params) {
  return {"allocation-only", [params](const ValuationProfile& bids) {
            MechanismEvaluation eval = EvaluateExact(bids, params, nullptr);
            std::fill(eval.payments.begin(), eval.payments.end(), 0.0);
            return eval;
          }};
}

Mechanism FlatFeeMechanism(const PrivacyParams& params, double fee) {
  return {"flat-fee", [params, fee](const ValuationProfile& bids) {
            MechanismEvaluation eval = EvaluateExact(bids, params, nullptr);
            std::fill(eval.payments.begin(), eval.payments.end(), fee);
            return eval;
          }};
}

Mechanism OverchargingMechanism(const PrivacyParams& params, double payment) {
  return {"overcharging", [params, payment](const ValuationProfile& bids) {
            MechanismEvaluation eval = EvaluateExact(bids, params, nullptr);
            std::fill(eval.payments.begin(), eval.payments.end(), payment);
            return eval;
          }};
}

Mechanism ArgmaxMechanism() {
  return {"argmax", [](const ValuationProfile& bids) {
            const VcgResult vcg = VcgReference(bids);
            MechanismEvaluation eval;
            eval.probs.assign(bids.outcomes(), 0.0);
            eval.log_probs.assign(bids.outcomes(), -kInf);
            eval.probs[vcg.outcome] = 1.0;
            eval.log_probs[vcg.outcome] = 0.0;
            eval.payments = vcg.payments;
            return eval;
          }};
}

BidEmbedding IdentityEmbedding(int outcomes, ValueDomain domain) {
  BidEmbedding e;
  e.dims = outcomes;
  e.low = DomainLow(domain);
  e.high = DomainHigh(domain);
  e.embed = [](int, std::span<const double> bid) {
    return std::vector<double>(bid.begin(), bid.end());
  };
  return e;
}

RowGenerator GridRows(const BidEmbedding& embedding, double step) {
  if (!(step > 0.0)) throw InputError("grid step must be positive");
  const double span = embedding.high - embedding.low;
  const int points = static_cast<int>(std::floor(span / step + 1e-9)) + 1;
  double total = 1.0;
  for (int d = 0; d < embedding.dims; ++d) total *= points;
  if (total > static_cast<double>(kIcMaxGridPoints)) {
    throw CapExceeded("deviation grid has " + std::to_string(total) +
                      " points, above the cap of " +
                      std::to_string(kIcMaxGridPoints));
  }
  const auto count = static_cast<std::uint64_t>(total);
  return [embedding, step, points, count](int agent, const ValuationProfile&,
                                          Rng&) {
    std::vector<std::vector<double>> rows;
    rows.reserve(count);
    std::vector<double> bid(embedding.dims);
    for (std::uint64_t code = 0; code < count; ++code) {
      std::uint64_t rest = code;
      for (int d = 0; d < embedding.dims; ++d) {
        const int k = static_cast<int>(rest % points);
        rest /= points;
        bid[d] = std::min(embedding.high, embedding.low + k * step);
      }
      rows.push_back(embedding.embed(agent, bid));
    }
    return rows;
  };
}

RowGenerator RandomRows(const BidEmbedding& embedding, int count,
                        bool include_extremal) {
  return [embedding, count, include_extremal](int agent,
                                              const ValuationProfile&,
                                              Rng& rng) {
    std::vector<std::vector<double>> rows;
    std::vector<double> bid(embedding.dims);
    if (include_extremal) {
      std::fill(bid.begin(), bid.end(), embedding.low);
      rows.push_back(embedding.embed(agent, bid));
      std::fill(bid.begin(), bid.end(), embedding.high);
      rows.push_back(embedding.embed(agent, bid));
    }
    for (int k = 0; k < count; ++k) {
      for (double& b : bid) {
        b = embedding.low + (embedding.high - embedding.low) * rng.Uniform();
      }
      rows.push_back(embedding.embed(agent, bid));
    }
    return rows;
  };
}

CheckReport CheckIc(const ValuationProfile& truth, const PrivacyParams& params,
                    const Mechanism& mechanism, const RowGenerator& deviations,
                    std::uint64_t seed) {
  return IcSweep(truth, params, mechanism, deviations, seed, true);
}

CheckReport CheckIcSerial(const ValuationProfile& truth,
                          const PrivacyParams& params,
                          const Mechanism& mechanism,
                          const RowGenerator& deviations, std::uint64_t seed) {
  return IcSweep(truth, params, mechanism, deviations, seed, false);
}

CheckReport CheckIc(const ValuationProfile& truth, const PrivacyParams& params,
                    double bid_grid_step, const Mechanism& mechanism) {
  if (truth.agents() > kIcMaxAgents || truth.outcomes() > kIcMaxOutcomes) {
    throw CapExceeded("exhaustive IC check needs at most " +
                      std::to_string(kIcMaxAgents) + " agents and " +
                      std::to_string(kIcMaxOutcomes) + " outcomes");
  }
  return CheckIc(
      truth, params, mechanism,
      GridRows(IdentityEmbedding(truth.outcomes(), truth.domain()),
               bid_grid_step));
}

CheckReport CheckIr(const ValuationProfile& truth, const PrivacyParams& params,
                    const Mechanism& mechanism) {
  params.Validate();
  const MechanismEvaluation eval = mechanism.evaluate(truth);
  CheckReport report;
  report.check_name = "ir";
  report.tolerance = kMarginTolerance;
  report.worst_case_margin = kInf;
  int worst = 0;
  for (int i = 0; i < truth.agents(); ++i) {
    const double u = ExpectedUtility(eval, truth.row(i), i);
    if (u < report.worst_case_margin) {
      report.worst_case_margin = u;
      worst = i;
    }
  }
  report.samples_used = static_cast<std::uint64_t>(truth.agents());
  report.Decide();
  if (!report.passed) {
    report.witness = "agent " + std::to_string(worst) + " (true row " +
                     FormatRow(truth.row(worst)) +
                     ") has expected utility " +
                     std::to_string(report.worst_case_margin) +
                     " under mechanism '" + mechanism.name + "'";
  }
  return report;
}

CheckReport CheckDp(const ValuationProfile& profile,
                    const PrivacyParams& params, const Mechanism& mechanism,
                    const RowGenerator& neighbours, Rng& rng) {
  params.Validate();
  const MechanismEvaluation base = mechanism.evaluate(profile);
  CheckReport report;
  report.check_name = "dp";
  report.tolerance = kMarginTolerance;
  double worst_ratio = 0.0;
  for (int i = 0; i < profile.agents(); ++i) {
    for (const auto& row : neighbours(i, profile, rng)) {
      const MechanismEvaluation other =
          mechanism.evaluate(profile.WithRow(i, row));
      ++report.samples_used;
      for (int r = 0; r < profile.outcomes(); ++r) {
        const double a = base.LogProb(r);
        const double b = other.LogProb(r);
        if (a == -kInf && b == -kInf) continue;
        const double ratio = std::abs(a - b);
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          if (ratio > params.epsilon + report.tolerance) {
            std::ostringstream w;
            w << "replacing agent " << i << "'s row by " << FormatRow(row)
              << " moves ln Pr[outcome " << r << "] by " << ratio
              << " > eps = " << params.epsilon;
            report.witness = w.str();
          }
        }
      }
    }
  }
  report.worst_case_margin = params.epsilon - worst_ratio;
  report.notes.emplace_back("max_log_ratio", worst_ratio);
  report.Decide();
  return report;
}

CheckReport CheckDp(const ValuationProfile& profile,
                    const PrivacyParams& params, int neighbour_count,
                    Rng& rng) {
  return CheckDp(
      profile, params, ExactMechanism(params),
      RandomRows(IdentityEmbedding(profile.outcomes(), profile.domain()),
                 neighbour_count, true),
      rng);
}

CheckReport CheckWelfareTail(const ValuationProfile& profile,
                             const PrivacyParams& params, double t,
                             std::uint64_t sample_count, Rng& rng) {
  if (sample_count < 10000) {
    throw InputError("welfare tail check needs at least 10^4 samples");
  }
  if (!(t >= 0.0)) throw InputError("tail parameter t must be non-negative");
  const OutcomeDistribution dist = GibbsDistribution(profile, params);
  const std::vector<double> welfare = profile.WelfareVector();
  const double best = *std::max_element(welfare.begin(), welfare.end());
  const double log_range = std::log(static_cast<double>(profile.outcomes()));
  const double conservative = best - 2.0 * (log_range + t) / params.epsilon;
  const double stated = best - (log_range + t) / params.epsilon;

  double exact_conservative = 0.0;
  double exact_stated = 0.0;
  for (int r = 0; r < profile.outcomes(); ++r) {
    if (welfare[r] < conservative) exact_conservative += dist.probs[r];
    if (welfare[r] < stated) exact_stated += dist.probs[r];
  }

  std::uint64_t below_conservative = 0;
  std::uint64_t below_stated = 0;
  for (std::uint64_t s = 0; s < sample_count; ++s) {
    const double w = welfare[SampleOutcome(dist, rng)];
    if (w < conservative) ++below_conservative;
    if (w < stated) ++below_stated;
  }
  const double n = static_cast<double>(sample_count);
  const double freq = below_conservative / n;
  const double bound = std::exp(-t);
  const double sigma = std::sqrt(bound * (1.0 - bound) / n);

  CheckReport report;
  report.check_name = "tail";
  report.samples_used = sample_count;
  report.tolerance = 0.0;
  report.worst_case_margin = bound + 3.0 * sigma - freq;
  report.Decide();
  if (!report.passed) {
    report.witness = "welfare fell below " + std::to_string(conservative) +
                     " in a fraction " + std::to_string(freq) +
                     " of draws, above e^-t + 3 sigma";
  }
  report.notes = {{"t", t},
                  {"threshold", conservative},
                  {"frequency", freq},
                  {"exact_probability", exact_conservative},
                  {"bound", bound},
                  {"sigma", sigma},
                  {"stated_threshold", stated},
                  {"stated_frequency", below_stated / n},
                  {"stated_exact_probability", exact_stated}};
  return report;
}

CheckReport CheckFreeEnergy(const ValuationProfile& profile,
                            const PrivacyParams& params, int trials,
                            Rng& rng) {
  return ObjectiveSweep(profile, params, nullptr, trials, rng, "free-energy");
}

CheckReport CheckKlObjective(const ValuationProfile& profile,
                             const PrivacyParams& params,
                             const PriorDistribution& prior, int trials,
                             Rng& rng) {
  if (prior.size() != profile.outcomes()) {
    throw InputError("prior size does not match range size");
  }
  return ObjectiveSweep(profile, params, &prior, trials, rng, "kl");
}

CheckReport CheckCyclicMonotonicity(const ValuationProfile& profile,
                                    const PrivacyParams& params,
                                    const Mechanism& mechanism,
                                    const BidEmbedding& embedding,
                                    int cycle_length, int trials, Rng& rng) {
  params.Validate();
  if (cycle_length < 2) throw InputError("cycle length must be at least 2");
  CheckReport report;
  report.check_name = "cyclic";
  report.tolerance = kMarginTolerance;
  report.worst_case_margin = kInf;
  std::vector<double> bid(embedding.dims);
  for (int trial = 0; trial < trials; ++trial) {
    const int agent = static_cast<int>(rng.Below(profile.agents()));
    std::vector<std::vector<double>> cycle;
    for (int k = 0; k < cycle_length; ++k) {
      for (double& b : bid) {
        b = embedding.low + (embedding.high - embedding.low) * rng.Uniform();
      }
      cycle.push_back(embedding.embed(agent, bid));
    }
    double margin = 0.0;
    for (int k = 0; k < cycle_length; ++k) {
      const MechanismEvaluation eval =
          mechanism.evaluate(profile.WithRow(agent, cycle[k]));
      const auto& next = cycle[(k + 1) % cycle_length];
      for (int r = 0; r < profile.outcomes(); ++r) {
        margin += eval.probs[r] * (cycle[k][r] - next[r]);
      }
    }
    ++report.samples_used;
    if (margin < report.worst_case_margin) {
      report.worst_case_margin = margin;
      if (margin < -report.tolerance) {
        report.witness = "agent " + std::to_string(agent) +
                         " valuation cycle of length " +
                         std::to_string(cycle_length) +
                         " violates cyclic monotonicity by " +
                         std::to_string(-margin);
      }
    }
  }
  if (trials == 0) report.worst_case_margin = 0.0;
  report.Decide();
  return report;
}

CheckReport CheckCyclicMonotonicity(const ValuationProfile& profile,
                                    const PrivacyParams& params,
                                    int cycle_length, int trials, Rng& rng) {
  return CheckCyclicMonotonicity(
      profile, params, ExactMechanism(params),
      IdentityEmbedding(profile.outcomes(), profile.domain()), cycle_length,
      trials, rng);
}

}  // namespace expmech
