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

// Command implementations behind the expmech binary. Each returns a
// machine-readable report with a stable field order; the binary prints it
// to stdout and a short human summary to stderr.

#ifndef EXPMECH_COMMANDS_H_
#define EXPMECH_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expmech/instance_io.h"
#include "expmech/verification.h"
#include "json.hpp"

namespace expmech {

// Command-line values that take precedence over the instance file.
struct Overrides {
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> gamma;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> noise_model;
  std::optional<std::string> estimator;
};
void ApplyOverrides(const Overrides& overrides, InstanceFile& instance);

// Throws InputError when the instance carries no seed.
std::uint64_t RequireSeed(const InstanceFile& instance);

struct CommandResult {
  nlohmann::ordered_json report;
  std::string summary;
  bool passed = true;
};

CommandResult RunCommand(const InstanceFile& instance);

inline constexpr const char* kCheckNames[] = {
    "ic", "ir", "dp", "tail", "free-energy", "kl", "cyclic", "sensitivity"};
// Comma-separated names, or "all". Throws InputError on unknown names.
std::vector<std::string> ParseCheckList(std::string_view text);
// The mechanism under test as described by the instance.
Mechanism InstanceMechanism(const InstanceFile& instance);
CheckReport RunCheck(const InstanceFile& instance, const std::string& check);
nlohmann::ordered_json CheckReportToJson(const CheckReport& report);
CommandResult VerifyCommand(const InstanceFile& instance,
                            const std::vector<std::string>& checks);

struct ExperimentOptions {
  std::string name;  // matching-lb | tree-lb | welfare-curve
  int size = 8;
  std::vector<double> epsilons = {0.5, 1.0, 2.0, 4.0, 8.0};
  int trials = 200;
  std::uint64_t seed = 0;
  // welfare-curve only.
  std::optional<InstanceFile> instance;
};
CommandResult ExperimentCommand(const ExperimentOptions& options);

// `draws` outcomes from the instance's sampler, tabulated against the exact
// Gibbs probabilities.
CommandResult SampleCommand(const InstanceFile& instance, int draws);

}  // namespace expmech

#endif  // EXPMECH_COMMANDS_H_
