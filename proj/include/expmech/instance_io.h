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

// Versioned JSON instance files.
//
//   {
//     "format_version": 1,
//     "kind": "explicit" | "matching" | "tree" | "cppp",
//     "payload": { ... },
//     "epsilon": 1.0, "delta": 0.0, "gamma": 0.0,
//     "seed": 42,
//     "payment_noise": "none" | "public" | "private",
//     "mechanism": "exact",          (optional; explicit and cppp only)
//     "mechanism_payment": 0.5,      (optional; flat-fee and overcharging)
//     "estimator": "exact"           (optional; matching only)
//   }
//
// Payloads:
//   explicit  {"values": [[...], ...], "domain": "values" | "costs",
//              "labels": [...], "prior": [...]}
//   matching  {"values": [[...], ...]}                      (n x n)
//   tree      {"nodes": k, "edges": [[u, v], ...], "costs": [...],
//              "pivot": "zero-cost" | "highest-cost"}
//             (edges default to the complete graph, pivot to zero-cost)
//   cppp      {"projects": m, "max_size": k, "values": [[...], ...]}
//             (one row per agent over the size-<=k subsets, empty set
//             first, then by size and lexicographically)

#ifndef EXPMECH_INSTANCE_IO_H_
#define EXPMECH_INSTANCE_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "expmech/cppp.h"
#include "expmech/matching.h"
#include "expmech/payment_privacy.h"
#include "expmech/spanning_tree.h"
#include "expmech/valuation.h"
#include "json.hpp"

namespace expmech {

inline constexpr int kInstanceFormatVersion = 1;

enum class InstanceKind { kExplicit, kMatching, kTree, kCppp };

std::string InstanceKindName(InstanceKind kind);

struct InstanceFile {
  int format_version = kInstanceFormatVersion;
  InstanceKind kind = InstanceKind::kExplicit;
  std::optional<ValuationProfile> explicit_profile;
  std::optional<std::vector<double>> prior;
  std::optional<MatchingInstance> matching;
  std::optional<TreeInstance> tree;
  TreePivot tree_pivot = TreePivot::kZeroCost;
  std::optional<CpppInstance> cppp;
  PrivacyParams params;
  std::optional<std::uint64_t> seed;
  NoiseModel payment_noise = NoiseModel::kNone;
  std::string mechanism = "exact";
  double mechanism_payment = 0.5;
  std::string estimator = "exact";
};

// Throws InputError naming "<source>:<line>:<column>" for malformed JSON
// and the JSON pointer of the offending field for schema violations.
InstanceFile ParseInstance(std::string_view text,
                           std::string_view source = "<input>");
InstanceFile LoadInstance(const std::string& path);

nlohmann::ordered_json InstanceToJson(const InstanceFile& instance);
std::string SerializeInstance(const InstanceFile& instance);

// The explicit-range view of any kind.
ValuationProfile ExplicitProfile(const InstanceFile& instance);

}  // namespace expmech

#endif  // EXPMECH_INSTANCE_IO_H_
