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

// Procurement auction for a spanning tree. Agent e owns edge e and incurs
// cost c_e if the edge is bought, so its valuation is -c_e * [e in T]. The
// Gibbs law over spanning trees is Pr[T] ~ prod_{e in T} exp(-(eps / 2) c_e),
// whose partition function is a Laplacian minor determinant (matrix-tree
// theorem). Sampling and payments are exact.

#ifndef EXPMECH_SPANNING_TREE_H_
#define EXPMECH_SPANNING_TREE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expmech/rng.h"
#include "expmech/valuation.h"
#include "expmech/verification.h"

namespace expmech {

inline constexpr int kMaxTreeNodes = 50;
// Largest (eps / 2) * cost accepted, so that edge weights stay normal.
inline constexpr double kMaxTreeLogWeight = 700.0;

struct Edge {
  int u = 0;
  int v = 0;
  bool operator==(const Edge&) const = default;
};

// Sorted edge indices.
using EdgeSet = std::vector<int>;

class TreeInstance {
 public:
  // Throws InputError for a disconnected graph, self-loops, out-of-range
  // endpoints or costs outside [0, 1].
  TreeInstance(int nodes, std::vector<Edge> edges, std::vector<double> costs);
  // K_k with edges (0,1), (0,2), ..., (0,k-1), (1,2), ...
  static TreeInstance Complete(int nodes, std::vector<double> costs);
  static std::vector<Edge> CompleteEdges(int nodes);

  int nodes() const { return nodes_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& costs() const { return costs_; }
  double cost(int edge) const { return costs_[edge]; }
  TreeInstance WithCost(int edge, double cost) const;
  TreeInstance WithCosts(std::vector<double> costs) const;
  double TreeCost(const EdgeSet& tree) const;

  bool operator==(const TreeInstance&) const = default;

 private:
  int nodes_;
  std::vector<Edge> edges_;
  std::vector<double> costs_;
};

// ln sum_T prod_{e in T} exp(-(eps / 2) c_e), with the cost of
// `zero_cost_edge` taken as 0 when given. LU on the reduced weighted
// Laplacian with log-accumulated pivots.
double LogTreePartition(const TreeInstance& instance,
                        const PrivacyParams& params,
                        std::optional<int> zero_cost_edge = std::nullopt);

// Pr[e in T] = 1 - Z(G - e) / Z(G); 1 for bridges.
double EdgeMarginal(const TreeInstance& instance, const PrivacyParams& params,
                    int edge);
std::vector<double> EdgeMarginals(const TreeInstance& instance,
                                  const PrivacyParams& params);

// S = ln Z + (eps / 2) sum_e c_e Pr[e in T].
double TreeEntropy(const TreeInstance& instance, const PrivacyParams& params);

// sum_e c_e Pr[e in T].
double ExpectedTotalCost(const TreeInstance& instance,
                         const PrivacyParams& params);

// Visits edges in `order` (input order when empty) and keeps each with its
// conditional probability given the decisions so far, computed on the
// contracted/deleted graph. The result is distributed exactly as the Gibbs
// law over spanning trees.
EdgeSet SampleTree(const TreeInstance& instance, const PrivacyParams& params,
                   Rng& rng, std::span<const int> order = {});

// Log of the product of the sampler's conditional decision probabilities
// along the path that produces `tree`.
double TreeDecisionLogProbability(const TreeInstance& instance,
                                  const PrivacyParams& params,
                                  const EdgeSet& tree,
                                  std::span<const int> order = {});

// Exclusion probability Pr[e not in T] = Z(G - e) / Z(G), computed through
// deletion rather than contraction.
double EdgeExclusionProbability(const TreeInstance& instance,
                                const PrivacyParams& params, int edge);

// Where the pivot term of the payment rule is evaluated. kZeroCost is the
// rule applied verbatim to v_e = -c_e [e in T]: a zero-cost agent receives
// 0, but every agent's expected utility (2 / eps) ln(Z / Z(c_e = 0)) is at
// most 0. kHighestCost evaluates the pivot at c_e = 1 instead, which leaves
// incentives unchanged and makes the expected utility
// (2 / eps) ln(Z / Z(c_e = 1)) nonnegative.
enum class TreePivot { kZeroCost, kHighestCost };

// Accepts "zero-cost" and "highest-cost".
TreePivot ParseTreePivot(std::string_view text);
std::string TreePivotName(TreePivot pivot);

// Transfer paid to the owner of `edge` (the negated price of the payment
// rule under v_e = -c_e [e in T]).
double TreePayment(const TreeInstance& instance, const PrivacyParams& params,
                   int edge, TreePivot pivot = TreePivot::kZeroCost);
std::vector<double> TreePayments(const TreeInstance& instance,
                                 const PrivacyParams& params,
                                 TreePivot pivot = TreePivot::kZeroCost);

struct TreeRun {
  EdgeSet tree;
  std::vector<double> transfers;
  double cost = 0.0;
  double expected_cost = 0.0;
  double entropy = 0.0;
  double log_partition = 0.0;
};
TreeRun RunTreeMechanism(const TreeInstance& instance,
                         const PrivacyParams& params, Rng& rng,
                         TreePivot pivot = TreePivot::kZeroCost);

// K_k with c_e = 0 w.p. 1/(2k) and 1 otherwise.
TreeInstance RandomCriticalInstance(int nodes, Rng& rng);

struct SpanningTree {
  EdgeSet edges;
  double cost = 0.0;
};
// Kruskal; ties broken by edge index.
SpanningTree MinimumSpanningTree(const TreeInstance& instance);

bool IsSpanningTree(const TreeInstance& instance, const EdgeSet& edges);

// True when the zero-cost edges contain a cycle.
bool HasCriticalCycle(const TreeInstance& instance);

// Every spanning tree, by scanning (k-1)-subsets of edges in lexicographic
// order. Throws CapExceeded when there are more than 5 * 10^6 subsets.
std::vector<EdgeSet> EnumerateSpanningTrees(const TreeInstance& instance);

// Explicit cost-domain profile over EnumerateSpanningTrees(instance).
ValuationProfile ToExplicitProfile(const TreeInstance& instance);

// Bid language of one edge owner: a single cost in [0, 1].
BidEmbedding TreeEmbedding(const TreeInstance& instance);

// The determinant backend as a black-box mechanism over explicit profiles
// laid out by ToExplicitProfile. Payments are prices, i.e. negated
// transfers.
Mechanism TreeMechanism(const TreeInstance& graph, const PrivacyParams& params,
                        TreePivot pivot = TreePivot::kZeroCost);

}  // namespace expmech

#endif  // EXPMECH_SPANNING_TREE_H_
