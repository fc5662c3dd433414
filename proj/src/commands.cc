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

#include "expmech/commands.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "expmech/cppp.h"
#include "expmech/error.h"
#include "expmech/experiments.h"
#include "expmech/matching.h"
#include "expmech/mechanism.h"
#include "expmech/payment_privacy.h"
#include "expmech/permanent.h"
#include "expmech/spanning_tree.h"

namespace expmech {
namespace {

using nlohmann::ordered_json;

// Verification sample sizes.
constexpr int kRandomDeviations = 200;
constexpr int kNeighbours = 100;
constexpr double kTailT = 1.0;
constexpr std::uint64_t kTailSamples = 100000;
constexpr int kObjectiveTrials = 1000;
constexpr int kCycleLength = 3;
constexpr int kCycleTrials = 100;
constexpr double kGridStep = 0.25;

// Allocation and noise draw from distinct streams of the seed.
constexpr std::uint64_t kAllocationStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kCheckStream = 2;

PrivacyParams EffectiveParams(const InstanceFile& instance) {
  PrivacyParams params = instance.params;
  const EstimatorSpec spec = ParseEstimator(instance.estimator);
  if (instance.kind == InstanceKind::kMatching && spec.gamma) {
    params.gamma = *spec.gamma;
  }
  params.Validate();
  return params;
}

std::optional<PriorDistribution> Prior(const InstanceFile& instance) {
  if (!instance.prior) return std::nullopt;
  return PriorDistribution(*instance.prior);
}

ordered_json NoiseJson(const NoisedPayments& noised) {
  ordered_json j;
  j["model"] = NoiseModelName(noised.model);
  j["scale"] = noised.scale;
  j["entry_variance"] = noised.entry_variance;
  j["total_variance"] = noised.total_variance;
  j["total_variance_sqrt"] = noised.total_variance_sqrt;
  return j;
}

std::string JoinInts(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(xs[i]);
  }
  return s;
}

BidEmbedding InstanceEmbedding(const InstanceFile& instance,
                               const ValuationProfile& profile) {
  switch (instance.kind) {
    case InstanceKind::kMatching:
      return MatchingEmbedding(instance.matching->size());
    case InstanceKind::kTree:
      return TreeEmbedding(*instance.tree);
    default:
      return IdentityEmbedding(profile.outcomes(), profile.domain());
  }
}

std::uint64_t GridSize(int dims) {
  std::uint64_t points = 1;
  const auto per_dim = static_cast<std::uint64_t>(std::lround(1.0 / kGridStep)) + 1;
  for (int d = 0; d < dims; ++d) {
    points *= per_dim;
    if (points > kIcMaxGridPoints) return points;
  }
  return points;
}

}  // namespace

void ApplyOverrides(const Overrides& o, InstanceFile& instance) {
  if (o.epsilon) instance.params.epsilon = *o.epsilon;
  if (o.delta) instance.params.delta = *o.delta;
  if (o.gamma) instance.params.gamma = *o.gamma;
  if (o.seed) instance.seed = *o.seed;
  if (o.noise_model) instance.payment_noise = ParseNoiseModel(*o.noise_model);
  if (o.estimator) {
    ParseEstimator(*o.estimator);
    instance.estimator = *o.estimator;
  }
  instance.params.Validate();
}

std::uint64_t RequireSeed(const InstanceFile& instance) {
  if (!instance.seed) {
    throw InputError("a seed is required: set \"seed\" in the instance or "
                     "pass --seed");
  }
  return *instance.seed;
}

CommandResult RunCommand(const InstanceFile& instance) {
  const std::uint64_t seed = RequireSeed(instance);
  const PrivacyParams params = EffectiveParams(instance);
  Rng rng = Rng::Stream(seed, kAllocationStream);
  Rng noise_rng = Rng::Stream(seed, kNoiseStream);

  ordered_json report;
  report["command"] = "run";
  report["kind"] = InstanceKindName(instance.kind);
  report["seed"] = seed;
  report["epsilon"] = params.epsilon;
  std::vector<double> payments;
  std::ostringstream summary;

  switch (instance.kind) {
    case InstanceKind::kExplicit:
    case InstanceKind::kCppp: {
      const ValuationProfile profile = ExplicitProfile(instance);
      const std::optional<PriorDistribution> prior = Prior(instance);
      const MechanismResult result =
          RunMechanism(profile, params, rng, prior ? &*prior : nullptr);
      payments = result.payments;
      report["outcome"] = result.outcome;
      report["outcome_label"] = profile.labels().empty()
                                    ? std::to_string(result.outcome)
                                    : profile.labels()[result.outcome];
      report["payments"] = payments;
      report["welfare"] = profile.Welfare(result.outcome);
      report["expected_welfare"] = result.expected_welfare;
      report["entropy"] = result.entropy;
      report["log_partition"] = result.log_partition;
      summary << "outcome " << report["outcome_label"].get<std::string>()
              << ", welfare " << profile.Welfare(result.outcome);
      break;
    }
    case InstanceKind::kMatching: {
      const EstimatorSpec spec = ParseEstimator(instance.estimator);
      const MatchingRun run =
          RunMatchingMechanism(*instance.matching, params, *spec.estimator, rng);
      payments = run.payments;
      report["outcome"] = run.assignment;
      report["outcome_label"] = JoinInts(run.assignment);
      report["estimator"] = spec.text;
      report["payments"] = payments;
      report["welfare"] = run.welfare;
      report["expected_welfare"] = run.expected_welfare;
      report["entropy"] = run.entropy;
      report["log_partition"] = run.log_partition;
      summary << "assignment " << JoinInts(run.assignment) << ", welfare "
              << run.welfare;
      break;
    }
    case InstanceKind::kTree: {
      const TreeRun run = RunTreeMechanism(*instance.tree, params, rng, instance.tree_pivot);
      for (double t : run.transfers) payments.push_back(-t);
      report["outcome"] = run.tree;
      report["outcome_label"] = JoinInts(run.tree);
      report["payments"] = payments;
      report["transfers"] = run.transfers;
      report["pivot"] = TreePivotName(instance.tree_pivot);
      report["welfare"] = -run.cost;
      report["expected_welfare"] = -run.expected_cost;
      report["entropy"] = run.entropy;
      report["log_partition"] = run.log_partition;
      summary << "tree edges " << JoinInts(run.tree) << ", cost " << run.cost;
      break;
    }
  }
  const NoisedPayments noised = NoisePayments(
      payments, instance.payment_noise, params.epsilon, noise_rng);
  report["noised_payments"] = noised.noised;
  report["payment_noise"] = NoiseJson(noised);
  return {report, summary.str(), true};
}

std::vector<std::string> ParseCheckList(std::string_view text) {
  std::vector<std::string> out;
  if (text == "all") {
    for (const char* name : kCheckNames) out.emplace_back(name);
    return out;
  }
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    if (std::find(std::begin(kCheckNames), std::end(kCheckNames), item) ==
        std::end(kCheckNames)) {
      throw InputError("unknown check '" + item +
                       "' (expected ic, ir, dp, tail, free-energy, kl, "
                       "cyclic, sensitivity or all)");
    }
    if (std::find(out.begin(), out.end(), item) == out.end()) {
      out.push_back(item);
    }
  }
  if (out.empty()) throw InputError("empty check list");
  return out;
}

Mechanism InstanceMechanism(const InstanceFile& instance) {
  const PrivacyParams params = EffectiveParams(instance);
  switch (instance.kind) {
    case InstanceKind::kMatching:
      return MatchingMechanism(instance.matching->size(), params,
                               ParseEstimator(instance.estimator).estimator,
                               instance.seed.value_or(0));
    case InstanceKind::kTree:
      return TreeMechanism(*instance.tree, params, instance.tree_pivot);
    default:
      break;
  }
  const std::string& name = instance.mechanism;
  if (name == "allocation-only") return AllocationOnlyMechanism(params);
  if (name == "flat-fee") {
    return FlatFeeMechanism(params, instance.mechanism_payment);
  }
  if (name == "argmax") return ArgmaxMechanism();
  if (name == "overcharging") {
    return OverchargingMechanism(params, instance.mechanism_payment);
  }
  return ExactMechanism(params, Prior(instance));
}

CheckReport RunCheck(const InstanceFile& instance, const std::string& check) {
  const std::uint64_t seed = RequireSeed(instance);
  const PrivacyParams params = EffectiveParams(instance);
  const ValuationProfile profile = ExplicitProfile(instance);
  const Mechanism mechanism = InstanceMechanism(instance);
  const BidEmbedding embedding = InstanceEmbedding(instance, profile);
  Rng rng = Rng::Stream(seed, kCheckStream);

  if (check == "ic") {
    if (GridSize(embedding.dims) <= kIcMaxGridPoints &&
        profile.agents() <= kIcMaxAgents &&
        (instance.kind != InstanceKind::kExplicit ||
         profile.outcomes() <= kIcMaxOutcomes)) {
      CheckReport r = CheckIc(profile, params, mechanism,
                              GridRows(embedding, kGridStep), seed);
      r.notes.emplace_back("grid_step", kGridStep);
      return r;
    }
    CheckReport r =
        CheckIc(profile, params, mechanism,
                RandomRows(embedding, kRandomDeviations, true), seed);
    r.notes.emplace_back("random_deviations", kRandomDeviations);
    return r;
  }
  if (check == "ir") return CheckIr(profile, params, mechanism);
  if (check == "dp") {
    // A noisy permanent estimator distorts each law by at most e^(gamma/8),
    // so the guarantee it can meet is eps + gamma / 4.
    PrivacyParams dp_params = params;
    double slack = 0.0;
    if (instance.kind == InstanceKind::kMatching &&
        !ParseEstimator(instance.estimator).estimator->is_exact()) {
      slack = params.gamma / 4.0;
      dp_params.epsilon += slack;
    }
    CheckReport r = CheckDp(profile, dp_params, mechanism,
                            RandomRows(embedding, kNeighbours, true), rng);
    if (slack > 0.0) r.notes.emplace_back("estimator_epsilon_slack", slack);
    return r;
  }
  if (check == "tail") {
    return CheckWelfareTail(profile, params, kTailT, kTailSamples, rng);
  }
  if (check == "free-energy") {
    return CheckFreeEnergy(profile, params, kObjectiveTrials, rng);
  }
  if (check == "kl") {
    const PriorDistribution prior =
        Prior(instance).value_or(PriorDistribution::Uniform(profile.outcomes()));
    return CheckKlObjective(profile, params, prior, kObjectiveTrials, rng);
  }
  if (check == "cyclic") {
    return CheckCyclicMonotonicity(profile, params, mechanism, embedding,
                                   kCycleLength, kCycleTrials, rng);
  }
  if (check == "sensitivity") {
    return CheckPaymentSensitivity(
        profile, mechanism, RandomRows(embedding, kNeighbours, true), rng);
  }
  throw InputError("unknown check '" + check + "'");
}

ordered_json CheckReportToJson(const CheckReport& report) {
  ordered_json j;
  j["check"] = report.check_name;
  j["passed"] = report.passed;
  j["worst_case_margin"] = report.worst_case_margin;
  j["tolerance"] = report.tolerance;
  j["samples_used"] = report.samples_used;
  j["witness"] = report.witness ? ordered_json(*report.witness)
                                : ordered_json(nullptr);
  ordered_json notes = ordered_json::object();
  for (const auto& [key, value] : report.notes) notes[key] = value;
  j["notes"] = notes;
  return j;
}

CommandResult VerifyCommand(const InstanceFile& instance,
                            const std::vector<std::string>& checks) {
  CommandResult result;
  ordered_json list = ordered_json::array();
  std::ostringstream summary;
  for (const std::string& name : checks) {
    const CheckReport r = RunCheck(instance, name);
    result.passed = result.passed && r.passed;
    list.push_back(CheckReportToJson(r));
    summary << (r.passed ? "PASS " : "FAIL ") << name << " margin "
            << r.worst_case_margin;
    if (r.witness) summary << " witness: " << *r.witness;
    summary << "\n";
  }
  result.report["command"] = "verify";
  result.report["kind"] = InstanceKindName(instance.kind);
  result.report["seed"] = RequireSeed(instance);
  result.report["mechanism"] = InstanceMechanism(instance).name;
  result.report["passed"] = result.passed;
  result.report["checks"] = list;
  result.summary = summary.str();
  return result;
}

CommandResult ExperimentCommand(const ExperimentOptions& options) {
  CommandResult result;
  ordered_json& report = result.report;
  report["command"] = "experiment";
  report["experiment"] = options.name;
  std::ostringstream summary;
  summary << "epsilon\tmean\topt\tgap\n";

  if (options.name == "matching-lb" || options.name == "tree-lb") {
    const bool matching = options.name == "matching-lb";
    const TradeoffTable table =
        matching ? MatchingLowerBoundExperiment(options.size, options.epsilons,
                                                options.trials, options.seed)
                 : TreeLowerBoundExperiment(options.size, options.epsilons,
                                            options.trials, options.seed);
    report["size"] = table.size;
    report["trials"] = table.trials;
    report["seed"] = table.seed;
    report["measure"] = matching ? "welfare" : "cost";
    report["gap_target"] = table.gap_target;
    report["smallest_epsilon_meeting_target"] =
        table.smallest_epsilon_meeting_target < 0.0
            ? ordered_json(nullptr)
            : ordered_json(table.smallest_epsilon_meeting_target);
    ordered_json rows = ordered_json::array();
    for (const TradeoffRow& row : table.rows) {
      ordered_json r;
      r["epsilon"] = row.epsilon;
      r["mean"] = row.mean;
      r["mean_stderr"] = row.mean_stderr;
      r["opt"] = row.mean_opt;
      r["opt_stderr"] = row.opt_stderr;
      r["gap"] = row.gap;
      r["gap_stderr"] = row.gap_stderr;
      if (!matching) {
        r["critical_cycle_frequency"] = row.critical_cycle_frequency;
      }
      rows.push_back(r);
      summary << row.epsilon << "\t" << row.mean << "\t" << row.mean_opt
              << "\t" << row.gap << "\n";
    }
    report["rows"] = rows;
  } else if (options.name == "welfare-curve") {
    if (!options.instance) {
      throw InputError("welfare-curve needs an instance file");
    }
    const InstanceFile& instance = *options.instance;
    const ValuationProfile profile = ExplicitProfile(instance);
    const std::optional<PriorDistribution> prior = Prior(instance);
    const std::vector<double> welfare = profile.WelfareVector();
    const double opt = *std::max_element(welfare.begin(), welfare.end());
    report["kind"] = InstanceKindName(instance.kind);
    ordered_json rows = ordered_json::array();
    for (double eps : options.epsilons) {
      PrivacyParams params = instance.params;
      params.epsilon = eps;
      params.Validate();
      const OutcomeDistribution dist =
          GibbsDistribution(profile, params, prior ? &*prior : nullptr);
      const double mean = Expectation(dist, welfare);
      ordered_json r;
      r["epsilon"] = eps;
      r["mean"] = mean;
      r["opt"] = opt;
      r["gap"] = opt - mean;
      rows.push_back(r);
      summary << eps << "\t" << mean << "\t" << opt << "\t" << opt - mean
              << "\n";
    }
    report["rows"] = rows;
  } else {
    throw InputError("unknown experiment '" + options.name +
                     "' (expected matching-lb, tree-lb or welfare-curve)");
  }
  result.summary = summary.str();
  return result;
}

CommandResult SampleCommand(const InstanceFile& instance, int draws) {
  if (draws < 1) throw InputError("sample needs at least one draw");
  const std::uint64_t seed = RequireSeed(instance);
  const PrivacyParams params = EffectiveParams(instance);
  const ValuationProfile profile = ExplicitProfile(instance);
  const std::optional<PriorDistribution> prior = Prior(instance);
  const OutcomeDistribution dist =
      GibbsDistribution(profile, params, prior ? &*prior : nullptr);
  std::map<std::string, int> index;
  for (int r = 0; r < profile.outcomes(); ++r) {
    index[profile.labels().empty() ? std::to_string(r) : profile.labels()[r]] =
        r;
  }
  Rng rng = Rng::Stream(seed, kAllocationStream);
  std::vector<std::uint64_t> counts(profile.outcomes(), 0);
  std::unique_ptr<EstimatorSpec> spec;
  if (instance.kind == InstanceKind::kMatching) {
    spec = std::make_unique<EstimatorSpec>(ParseEstimator(instance.estimator));
  }
  for (int d = 0; d < draws; ++d) {
    switch (instance.kind) {
      case InstanceKind::kMatching: {
        const MatchingSample s = SequentialSample(*instance.matching, params,
                                                  *spec->estimator, rng);
        ++counts[index.at(JoinInts(s.assignment))];
        break;
      }
      case InstanceKind::kTree:
        ++counts[index.at(JoinInts(SampleTree(*instance.tree, params, rng)))];
        break;
      default:
        ++counts[SampleOutcome(dist, rng)];
        break;
    }
  }
  CommandResult result;
  result.report["command"] = "sample";
  result.report["kind"] = InstanceKindName(instance.kind);
  result.report["seed"] = seed;
  result.report["draws"] = draws;
  ordered_json rows = ordered_json::array();
  std::ostringstream summary;
  for (int r = 0; r < profile.outcomes(); ++r) {
    ordered_json row;
    row["outcome"] = r;
    row["label"] =
        profile.labels().empty() ? std::to_string(r) : profile.labels()[r];
    row["count"] = counts[r];
    row["frequency"] = static_cast<double>(counts[r]) / draws;
    row["probability"] = dist.probs[r];
    rows.push_back(row);
  }
  result.report["outcomes"] = rows;
  summary << draws << " draws over " << profile.outcomes() << " outcomes";
  result.summary = summary.str();
  return result;
}

}  // namespace expmech
