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

#include "expmech/instance_io.h"

#include <string>
#include <vector>

#include "expmech/error.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace expmech {
namespace {

using ::testing::HasSubstr;

const char* const kCorpus[] = {"explicit_small.json", "explicit_prior.json",
                               "matching_n3.json", "tree_k4.json",
                               "cppp_small.json"};

std::string CorpusPath(const std::string& name) {
  return std::string(EXPMECH_SOURCE_DIR) + "/corpus/" + name;
}

std::string ErrorOf(std::string_view text) {
  try {
    ParseInstance(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(InstanceIoTest, CorpusRoundTrip) {
  for (const char* name : kCorpus) {
    const InstanceFile first = LoadInstance(CorpusPath(name));
    const std::string text = SerializeInstance(first);
    const InstanceFile second = ParseInstance(text, name);
    EXPECT_EQ(SerializeInstance(second), text) << name;
    EXPECT_EQ(second.kind, first.kind);
    EXPECT_EQ(second.seed, first.seed);
    EXPECT_EQ(second.params.epsilon, first.params.epsilon);
    EXPECT_EQ(ExplicitProfile(second).values(), ExplicitProfile(first).values())
        << name;
  }
}

TEST(InstanceIoTest, MalformedJsonNamesLineAndColumn) {
  const std::string text = "{\n  \"kind\": \"explicit\",\n  oops\n}";
  const std::string msg = ErrorOf(text);
  EXPECT_THAT(msg, HasSubstr("<input>:3:"));
  EXPECT_THAT(msg, HasSubstr("malformed JSON"));
}

TEST(InstanceIoTest, SchemaErrorsNameField) {
  const std::string base =
      R"({"format_version": 1, "kind": "explicit", "epsilon": 1.0, "seed": 3,
          "payload": {"values": [[0.1, 1.5]]}})";
  EXPECT_THAT(ErrorOf(base), HasSubstr("field /payload/values: "));
  EXPECT_THAT(ErrorOf(base), HasSubstr("agent 0 for outcome 1"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "explicit", "epsilon": 1,
                          "payload": {"values": [[0.1, "x"]]}})"),
              HasSubstr("/payload/values/0/1"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "explicit",
                          "payload": {"values": [[0.1]]}})"),
              HasSubstr("/epsilon"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 2, "kind": "explicit", "epsilon": 1,
                          "payload": {"values": [[0.1]]}})"),
              HasSubstr("/format_version"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "graph", "epsilon": 1,
                          "payload": {}})"),
              HasSubstr("/kind"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "explicit", "epsilon": 1,
                          "payload": {"values": [[0.1]]}, "colour": 1})"),
              HasSubstr("colour"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "explicit", "epsilon": 1,
                          "payment_noise": "loud",
                          "payload": {"values": [[0.1]]}})"),
              HasSubstr("/payment_noise"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "explicit", "epsilon": -1,
                          "payload": {"values": [[0.1]]}})"),
              HasSubstr("/epsilon"));
}

TEST(InstanceIoTest, KindSpecificValidation) {
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "matching", "epsilon": 1,
                          "payload": {"values": [[0.1, 0.2]]}})"),
              HasSubstr("/payload/values"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "matching", "epsilon": 1,
                          "mechanism": "flat-fee",
                          "payload": {"values": [[0.1]]}})"),
              HasSubstr("/mechanism"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "tree", "epsilon": 1,
                          "payload": {"nodes": 3, "edges": [[0, 1]],
                                      "costs": [0.5]}})"),
              HasSubstr("/payload"));
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "cppp", "epsilon": 1,
                          "payload": {"projects": 2, "max_size": 1,
                                      "values": [[0.0, 0.5]]}})"),
              HasSubstr("expected 1 x 3"));
}

TEST(InstanceIoTest, TreeDefaults) {
  const InstanceFile f = ParseInstance(
      R"({"format_version": 1, "kind": "tree", "epsilon": 1,
          "payload": {"nodes": 3, "costs": [0.1, 0.2, 0.3]}})");
  ASSERT_TRUE(f.tree.has_value());
  EXPECT_EQ(f.tree->edges(), TreeInstance::CompleteEdges(3));
  EXPECT_EQ(f.tree_pivot, TreePivot::kZeroCost);
  EXPECT_FALSE(f.seed.has_value());
  EXPECT_EQ(f.payment_noise, NoiseModel::kNone);
}

TEST(InstanceIoTest, SeedIsUnsigned64) {
  const InstanceFile f = ParseInstance(
      R"({"format_version": 1, "kind": "explicit", "epsilon": 1,
          "seed": 18446744073709551615, "payload": {"values": [[0.1]]}})");
  EXPECT_EQ(*f.seed, 18446744073709551615ull);
  EXPECT_THAT(ErrorOf(R"({"format_version": 1, "kind": "explicit", "epsilon": 1,
                          "seed": -4, "payload": {"values": [[0.1]]}})"),
              HasSubstr("/seed"));
}

TEST(InstanceIoTest, MatchingCapIsNamed) {
  std::string rows;
  for (int i = 0; i < 21; ++i) {
    rows += (i ? "," : "") + std::string("[");
    for (int j = 0; j < 21; ++j) rows += (j ? ",0" : "0");
    rows += "]";
  }
  const std::string text = R"({"format_version": 1, "kind": "matching",
      "epsilon": 1, "payload": {"values": [)" + rows + "]}}";
  EXPECT_THROW(ParseInstance(text), CapExceeded);
}

TEST(InstanceIoTest, MissingFileIsInputError) {
  EXPECT_THROW(LoadInstance("/nonexistent/instance.json"), InputError);
}

}  // namespace
}  // namespace expmech
