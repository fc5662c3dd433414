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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "expmech/error.h"

namespace expmech {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void FieldError(const std::string& path, const std::string& what) {
  throw InputError("field " + (path.empty() ? std::string("/") : path) + ": " +
                   what);
}

const json& Require(const json& obj, const std::string& path,
                    const std::string& key) {
  if (!obj.contains(key)) FieldError(path + "/" + key, "missing");
  return obj.at(key);
}

double Number(const json& v, const std::string& path) {
  if (!v.is_number()) FieldError(path, "expected a number");
  return v.get<double>();
}

int Integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) FieldError(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < -(1LL << 30) || x > (1LL << 30)) FieldError(path, "out of range");
  return static_cast<int>(x);
}

std::string String(const json& v, const std::string& path) {
  if (!v.is_string()) FieldError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> NumberArray(const json& v, const std::string& path) {
  if (!v.is_array()) FieldError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(Number(v[i], path + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<std::vector<double>> Table(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    FieldError(path, "expected a nonempty array of rows");
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    rows.push_back(NumberArray(v[i], path + "/" + std::to_string(i)));
    if (rows.back().size() != rows.front().size()) {
      FieldError(path + "/" + std::to_string(i),
                 "row length differs from row 0");
    }
  }
  return rows;
}

std::vector<double> Flatten(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  return flat;
}

ordered_json TableJson(int rows, int cols, const std::vector<double>& flat) {
  ordered_json table = ordered_json::array();
  for (int i = 0; i < rows; ++i) {
    table.push_back(std::vector<double>(
        flat.begin() + static_cast<std::ptrdiff_t>(i) * cols,
        flat.begin() + static_cast<std::ptrdiff_t>(i + 1) * cols));
  }
  return table;
}

// Runs a module constructor, attributing its InputError to `path`.
template <typename F>
auto Build(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const CapExceeded& e) {
    throw CapExceeded("field " + path + ": " + e.what());
  } catch (const InputError& e) {
    FieldError(path, e.what());
  }
}

void ParseExplicit(const json& payload, const std::string& path,
                   InstanceFile& out) {
  const auto rows = Table(Require(payload, path, "values"), path + "/values");
  ValueDomain domain = ValueDomain::kValues;
  if (payload.contains("domain")) {
    const std::string d = String(payload["domain"], path + "/domain");
    if (d == "costs") {
      domain = ValueDomain::kCosts;
    } else if (d != "values") {
      FieldError(path + "/domain", "expected \"values\" or \"costs\"");
    }
  }
  std::vector<std::string> labels;
  if (payload.contains("labels")) {
    const json& l = payload["labels"];
    if (!l.is_array()) FieldError(path + "/labels", "expected an array");
    for (std::size_t i = 0; i < l.size(); ++i) {
      labels.push_back(String(l[i], path + "/labels/" + std::to_string(i)));
    }
  }
  out.explicit_profile = Build(path + "/values", [&] {
    return ValuationProfile(static_cast<int>(rows.size()),
                            static_cast<int>(rows.front().size()),
                            Flatten(rows), domain, labels);
  });
  if (payload.contains("prior")) {
    std::vector<double> mu = NumberArray(payload["prior"], path + "/prior");
    if (static_cast<int>(mu.size()) != out.explicit_profile->outcomes()) {
      FieldError(path + "/prior", "needs one entry per outcome");
    }
    Build(path + "/prior", [&] { return PriorDistribution(mu); });
    out.prior = std::move(mu);
  }
}

void ParseMatching(const json& payload, const std::string& path,
                   InstanceFile& out) {
  const auto rows = Table(Require(payload, path, "values"), path + "/values");
  out.matching = Build(path + "/values",
                       [&] { return MatchingInstance::FromRows(rows); });
}

void ParseTree(const json& payload, const std::string& path,
               InstanceFile& out) {
  const int nodes = Integer(Require(payload, path, "nodes"), path + "/nodes");
  std::vector<Edge> edges;
  if (payload.contains("edges")) {
    const json& e = payload["edges"];
    if (!e.is_array()) FieldError(path + "/edges", "expected an array");
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string p = path + "/edges/" + std::to_string(i);
      if (!e[i].is_array() || e[i].size() != 2) {
        FieldError(p, "expected a [u, v] pair");
      }
      edges.push_back({Integer(e[i][0], p + "/0"), Integer(e[i][1], p + "/1")});
    }
  } else {
    if (nodes < 2 || nodes > kMaxTreeNodes) {
      FieldError(path + "/nodes", "must lie in [2, " +
                                      std::to_string(kMaxTreeNodes) + "]");
    }
    edges = TreeInstance::CompleteEdges(nodes);
  }
  std::vector<double> costs =
      NumberArray(Require(payload, path, "costs"), path + "/costs");
  if (payload.contains("pivot")) {
    out.tree_pivot = Build(path + "/pivot", [&] {
      return ParseTreePivot(String(payload["pivot"], path + "/pivot"));
    });
  }
  out.tree = Build(path, [&] {
    return TreeInstance(nodes, std::move(edges), std::move(costs));
  });
}

void ParseCppp(const json& payload, const std::string& path,
               InstanceFile& out) {
  const int m =
      Integer(Require(payload, path, "projects"), path + "/projects");
  const int k =
      Integer(Require(payload, path, "max_size"), path + "/max_size");
  const auto rows = Table(Require(payload, path, "values"), path + "/values");
  out.cppp = Build(path, [&] {
    return CpppInstance(m, k, static_cast<int>(rows.size()), Flatten(rows));
  });
}

std::pair<int, int> LineColumn(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

std::string InstanceKindName(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kExplicit:
      return "explicit";
    case InstanceKind::kMatching:
      return "matching";
    case InstanceKind::kTree:
      return "tree";
    case InstanceKind::kCppp:
      return "cppp";
  }
  return "explicit";
}

InstanceFile ParseInstance(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is one past the offending character.
    const auto [line, column] =
        LineColumn(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": malformed JSON";
    throw InputError(msg.str());
  }
  if (!doc.is_object()) FieldError("", "instance must be a JSON object");

  InstanceFile out;
  out.format_version =
      Integer(Require(doc, "", "format_version"), "/format_version");
  if (out.format_version != kInstanceFormatVersion) {
    FieldError("/format_version",
               "unsupported version " + std::to_string(out.format_version));
  }
  const std::string kind = String(Require(doc, "", "kind"), "/kind");
  const json& payload = Require(doc, "", "payload");
  if (!payload.is_object()) FieldError("/payload", "expected an object");
  if (kind == "explicit") {
    out.kind = InstanceKind::kExplicit;
    ParseExplicit(payload, "/payload", out);
  } else if (kind == "matching") {
    out.kind = InstanceKind::kMatching;
    ParseMatching(payload, "/payload", out);
  } else if (kind == "tree") {
    out.kind = InstanceKind::kTree;
    ParseTree(payload, "/payload", out);
  } else if (kind == "cppp") {
    out.kind = InstanceKind::kCppp;
    ParseCppp(payload, "/payload", out);
  } else {
    FieldError("/kind", "unknown kind '" + kind +
                            "' (expected explicit, matching, tree or cppp)");
  }

  out.params.epsilon = Number(Require(doc, "", "epsilon"), "/epsilon");
  if (doc.contains("delta")) out.params.delta = Number(doc["delta"], "/delta");
  if (doc.contains("gamma")) out.params.gamma = Number(doc["gamma"], "/gamma");
  Build("/epsilon", [&] {
    out.params.Validate();
    return 0;
  });
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned()) {
      FieldError("/seed", "expected a nonnegative 64-bit integer");
    }
    out.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("payment_noise")) {
    out.payment_noise = Build("/payment_noise", [&] {
      return ParseNoiseModel(String(doc["payment_noise"], "/payment_noise"));
    });
  }
  if (doc.contains("mechanism")) {
    out.mechanism = String(doc["mechanism"], "/mechanism");
    static const char* kKnown[] = {"exact", "allocation-only", "flat-fee",
                                   "argmax", "overcharging"};
    if (std::find(std::begin(kKnown), std::end(kKnown), out.mechanism) ==
        std::end(kKnown)) {
      FieldError("/mechanism", "unknown mechanism '" + out.mechanism + "'");
    }
    if (out.mechanism != "exact" && out.kind != InstanceKind::kExplicit &&
        out.kind != InstanceKind::kCppp) {
      FieldError("/mechanism",
                 "alternative mechanisms apply to explicit and cppp kinds");
    }
  }
  if (doc.contains("mechanism_payment")) {
    out.mechanism_payment =
        Number(doc["mechanism_payment"], "/mechanism_payment");
  }
  if (doc.contains("estimator")) {
    out.estimator = String(doc["estimator"], "/estimator");
    Build("/estimator", [&] { return ParseEstimator(out.estimator); });
  }
  for (const auto& [key, value] : doc.items()) {
    static const char* kFields[] = {
        "format_version", "kind",          "payload",   "epsilon",
        "delta",          "gamma",         "seed",      "payment_noise",
        "mechanism",      "mechanism_payment", "estimator"};
    if (std::find(std::begin(kFields), std::end(kFields), key) ==
        std::end(kFields)) {
      FieldError("/" + key, "unknown field");
    }
  }
  return out;
}

InstanceFile LoadInstance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open instance file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseInstance(buffer.str(), path);
}

ordered_json InstanceToJson(const InstanceFile& instance) {
  ordered_json doc;
  doc["format_version"] = instance.format_version;
  doc["kind"] = InstanceKindName(instance.kind);
  ordered_json payload;
  switch (instance.kind) {
    case InstanceKind::kExplicit: {
      const ValuationProfile& p = *instance.explicit_profile;
      payload["values"] = TableJson(p.agents(), p.outcomes(), p.values());
      payload["domain"] =
          p.domain() == ValueDomain::kCosts ? "costs" : "values";
      if (!p.labels().empty()) payload["labels"] = p.labels();
      if (instance.prior) payload["prior"] = *instance.prior;
      break;
    }
    case InstanceKind::kMatching: {
      const MatchingInstance& m = *instance.matching;
      payload["values"] = TableJson(m.size(), m.size(), m.values());
      break;
    }
    case InstanceKind::kTree: {
      const TreeInstance& t = *instance.tree;
      payload["nodes"] = t.nodes();
      ordered_json edges = ordered_json::array();
      for (const Edge& e : t.edges()) edges.push_back({e.u, e.v});
      payload["edges"] = edges;
      payload["costs"] = t.costs();
      payload["pivot"] = TreePivotName(instance.tree_pivot);
      break;
    }
    case InstanceKind::kCppp: {
      const CpppInstance& c = *instance.cppp;
      payload["projects"] = c.projects();
      payload["max_size"] = c.max_size();
      payload["values"] = TableJson(c.agents(), c.range_size(), c.values());
      break;
    }
  }
  doc["payload"] = payload;
  doc["epsilon"] = instance.params.epsilon;
  doc["delta"] = instance.params.delta;
  doc["gamma"] = instance.params.gamma;
  if (instance.seed) doc["seed"] = *instance.seed;
  doc["payment_noise"] = NoiseModelName(instance.payment_noise);
  doc["mechanism"] = instance.mechanism;
  doc["mechanism_payment"] = instance.mechanism_payment;
  doc["estimator"] = instance.estimator;
  return doc;
}

std::string SerializeInstance(const InstanceFile& instance) {
  return InstanceToJson(instance).dump(2) + "\n";
}

ValuationProfile ExplicitProfile(const InstanceFile& instance) {
  switch (instance.kind) {
    case InstanceKind::kExplicit:
      return *instance.explicit_profile;
    case InstanceKind::kMatching:
      return ToExplicitProfile(*instance.matching);
    case InstanceKind::kTree:
      return ToExplicitProfile(*instance.tree);
    case InstanceKind::kCppp:
      return ToExplicitProfile(*instance.cppp);
  }
  throw InputError("unknown instance kind");
}

}  // namespace expmech
