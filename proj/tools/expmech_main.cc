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

// Command-line front end for the exponential-mechanism auction toolkit.
// Exit status is 0 on success, 1 when a verification check fails, and 2 on
// malformed input or exceeded caps.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "expmech/commands.h"
#include "expmech/error.h"
#include "expmech/instance_io.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

void AddInstanceFlags(CLI::App* cmd, std::string& path,
                      expmech::Overrides& o) {
  cmd->add_option("instance", path, "Instance file (JSON)")->required();
  cmd->add_option("--epsilon", o.epsilon, "Privacy parameter epsilon");
  cmd->add_option("--delta", o.delta, "Privacy parameter delta");
  cmd->add_option("--gamma", o.gamma, "Incentive-compatibility slack");
  cmd->add_option("--seed", o.seed, "64-bit seed");
  cmd->add_option("--noise-model", o.noise_model,
                  "Payment noise: none, public or private");
  cmd->add_option("--estimator", o.estimator,
                  "Permanent estimator: exact or noisy:<gamma>");
}

expmech::InstanceFile Load(const std::string& path,
                           const expmech::Overrides& o) {
  expmech::InstanceFile instance = expmech::LoadInstance(path);
  expmech::ApplyOverrides(o, instance);
  return instance;
}

void Emit(const expmech::CommandResult& result) {
  std::cout << result.report.dump(2) << "\n";
  if (!result.summary.empty()) {
    std::cerr << result.summary;
    if (result.summary.back() != '\n') std::cerr << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truthful differentially private exponential-mechanism "
               "auctions"};
  app.require_subcommand(1);

  std::string path;
  expmech::Overrides overrides;

  CLI::App* run = app.add_subcommand("run", "Run the mechanism once");
  AddInstanceFlags(run, path, overrides);

  std::string checks = "all";
  CLI::App* verify =
      app.add_subcommand("verify", "Certify mechanism properties");
  AddInstanceFlags(verify, path, overrides);
  verify->add_option("--checks", checks,
                     "Comma-separated: ic,ir,dp,tail,free-energy,kl,cyclic,"
                     "sensitivity (default all)");

  int draws = 1000;
  CLI::App* sample =
      app.add_subcommand("sample", "Tabulate sampled outcomes");
  AddInstanceFlags(sample, path, overrides);
  sample->add_option("--trials", draws, "Number of draws");

  expmech::ExperimentOptions experiment;
  std::optional<std::string> experiment_instance;
  CLI::App* exp = app.add_subcommand(
      "experiment", "Welfare-versus-epsilon experiments");
  exp->add_option("name", experiment.name,
                  "matching-lb, tree-lb or welfare-curve")
      ->required();
  exp->add_option("--size", experiment.size, "n (matching) or k (tree)");
  exp->add_option("--epsilons", experiment.epsilons, "Epsilon grid")
      ->delimiter(',');
  exp->add_option("--trials", experiment.trials, "Random instances");
  exp->add_option("--seed", experiment.seed, "64-bit seed");
  exp->add_option("--instance", experiment_instance,
                  "Instance file (welfare-curve)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*run) {
      Emit(expmech::RunCommand(Load(path, overrides)));
    } else if (*verify) {
      const std::vector<std::string> names = expmech::ParseCheckList(checks);
      const expmech::CommandResult result =
          expmech::VerifyCommand(Load(path, overrides), names);
      Emit(result);
      return result.passed ? kExitOk : kExitCheckFailed;
    } else if (*sample) {
      Emit(expmech::SampleCommand(Load(path, overrides), draws));
    } else if (*exp) {
      if (experiment_instance) {
        experiment.instance = expmech::LoadInstance(*experiment_instance);
      }
      Emit(expmech::ExperimentCommand(experiment));
    }
  } catch (const expmech::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
