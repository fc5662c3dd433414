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

#include "expmech/spanning_tree.h"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "expmech/error.h"

namespace expmech {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMaxSubsets = 5e6;

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int Find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // False if already joined.
  bool Union(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

// Scalar used for a Laplacian solve. Edge weights spanning more than
// kDoubleLogRange nats lose the light edges against the heavy ones in
// double precision, so wider ranges switch to binary floats with enough
// digits to hold both ends.
enum class Precision { kDouble, kWide, kFull };

constexpr double kDoubleLogRange = 12.0;
constexpr double kWideLogRange = 80.0;

using WideReal = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<60>, boost::multiprecision::et_off>;
using FullReal = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<340>, boost::multiprecision::et_off>;

Precision PrecisionFor(const std::vector<double>& log_weights) {
  const auto [lo, hi] =
      std::minmax_element(log_weights.begin(), log_weights.end());
  const double range = log_weights.empty() ? 0.0 : *hi - *lo;
  if (range <= kDoubleLogRange) return Precision::kDouble;
  if (range <= kWideLogRange) return Precision::kWide;
  return Precision::kFull;
}

// ln det of the Laplacian over supernodes with the last row and column
// removed. Edges inside a supernode are skipped; a single supernode has the
// empty minor, det 1.
template <typename Real>
double LogReducedDeterminant(int supernodes, const std::vector<Edge>& edges,
                             const std::vector<double>& log_weights,
                             const std::vector<bool>& present,
                             const std::vector<int>& label) {
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  const int size = supernodes - 1;
  if (size <= 0) return 0.0;
  Matrix laplacian = Matrix::Zero(size, size);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!present[e]) continue;
    const int a = label[edges[e].u];
    const int b = label[edges[e].v];
    if (a == b) continue;
    using std::exp;
    const Real w = exp(Real(log_weights[e]));
    if (a < size) laplacian(a, a) += w;
    if (b < size) laplacian(b, b) += w;
    if (a < size && b < size) {
      laplacian(a, b) -= w;
      laplacian(b, a) -= w;
    }
  }
  const Eigen::PartialPivLU<Matrix> lu(laplacian);
  const Matrix& u = lu.matrixLU();
  double log_det = 0.0;
  for (int k = 0; k < size; ++k) {
    using std::abs;
    using std::log;
    const Real pivot = abs(u(k, k));
    if (!(pivot > 0)) return kNegInf;
    log_det += static_cast<double>(log(pivot));
  }
  return log_det;
}

bool Connected(int nodes, const std::vector<Edge>& edges) {
  UnionFind uf(nodes);
  int components = nodes;
  for (const Edge& e : edges) {
    if (uf.Union(e.u, e.v)) --components;
  }
  return components == 1;
}

void CheckParams(const TreeInstance& instance, const PrivacyParams& params) {
  params.Validate();
  double max_cost = 0.0;
  for (double c : instance.costs()) max_cost = std::max(max_cost, c);
  if (params.epsilon / 2.0 * max_cost > kMaxTreeLogWeight) {
    throw CapExceeded("(eps / 2) * cost exceeds " +
                      std::to_string(kMaxTreeLogWeight) +
                      "; edge weights would underflow");
  }
}

void CheckEdge(const TreeInstance& instance, int edge) {
  if (edge < 0 || edge >= instance.edge_count()) {
    throw InputError("edge index out of range");
  }
}

// ln w_e = -(eps / 2) c_e.
std::vector<double> EdgeLogWeights(const TreeInstance& instance,
                                   const PrivacyParams& params) {
  std::vector<double> w(instance.edge_count());
  for (int e = 0; e < instance.edge_count(); ++e) {
    w[e] = -params.epsilon / 2.0 * instance.cost(e);
  }
  return w;
}

// Weighted graph over supernodes with edges marked present or deleted.
// Every partition is recomputed from the edge list rather than updated in
// place, so deleting a heavy edge cannot cancel the light ones.
class ConditionedGraph {
 public:
  ConditionedGraph(const TreeInstance& instance,
                   std::vector<double> log_weights)
      : edges_(instance.edges()),
        log_weights_(std::move(log_weights)),
        precision_(PrecisionFor(log_weights_)),
        present_(edges_.size(), true),
        label_(instance.nodes()),
        supernodes_(instance.nodes()) {
    std::iota(label_.begin(), label_.end(), 0);
    log_z_ = Compute(label_, supernodes_);
  }

  double log_z() const { return log_z_; }

  // Pr[e in T | decisions so far]; 0 for an edge whose endpoints have
  // already been merged.
  double InclusionProbability(int edge) {
    const auto [a, b] = Ends(edge);
    if (a == b) return 0.0;
    contracted_label_ = Merged(a, b);
    contracted_log_z_ = Compute(contracted_label_, supernodes_ - 1);
    const double p =
        std::exp(log_weights_[edge] + contracted_log_z_ - log_z_);
    if (!std::isfinite(p)) {
      throw NumericalError("spanning-tree conditioning produced a non-finite "
                           "inclusion probability");
    }
    return std::clamp(p, 0.0, 1.0);
  }

  // Applies the decision for the edge last passed to InclusionProbability.
  void Include(int edge) {
    present_[edge] = false;
    label_ = std::move(contracted_label_);
    --supernodes_;
    log_z_ = contracted_log_z_;
  }

  void Exclude(int edge) {
    present_[edge] = false;
    const auto [a, b] = Ends(edge);
    if (a == b) return;
    log_z_ = Compute(label_, supernodes_);
  }

  // ln Z with everything present; -inf when the present edges do not span.
  double Compute(const std::vector<int>& label, int supernodes) const {
    UnionFind uf(supernodes);
    int components = supernodes;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (present_[e] && uf.Union(label[edges_[e].u], label[edges_[e].v])) {
        --components;
      }
    }
    if (components != 1) return kNegInf;
    switch (precision_) {
      case Precision::kDouble:
        return LogReducedDeterminant<double>(supernodes, edges_, log_weights_,
                                             present_, label);
      case Precision::kWide:
        return LogReducedDeterminant<WideReal>(supernodes, edges_,
                                               log_weights_, present_, label);
      case Precision::kFull:
        return LogReducedDeterminant<FullReal>(supernodes, edges_,
                                               log_weights_, present_, label);
    }
    return kNegInf;
  }

 private:
  std::pair<int, int> Ends(int edge) const {
    return {label_[edges_[edge].u], label_[edges_[edge].v]};
  }

  // Labels with supernode hi folded into lo and the labels above hi shifted
  // down.
  std::vector<int> Merged(int a, int b) const {
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    std::vector<int> out = label_;
    for (int& l : out) {
      if (l == hi) {
        l = lo;
      } else if (l > hi) {
        --l;
      }
    }
    return out;
  }

  std::vector<Edge> edges_;
  std::vector<double> log_weights_;
  Precision precision_;
  std::vector<bool> present_;
  std::vector<int> label_;
  int supernodes_;
  double log_z_ = 0.0;
  std::vector<int> contracted_label_;
  double contracted_log_z_ = 0.0;
};

// ln Z of the full graph and of the graph with `edge` deleted.
std::pair<double, double> LogPartitionWithDeletion(
    const TreeInstance& instance, const PrivacyParams& params, int edge) {
  ConditionedGraph graph(instance, EdgeLogWeights(instance, params));
  const double log_z = graph.log_z();
  graph.Exclude(edge);
  return {log_z, graph.log_z()};
}

std::vector<int> EdgeOrder(const TreeInstance& instance,
                           std::span<const int> order) {
  std::vector<int> seq(order.begin(), order.end());
  if (seq.empty()) {
    seq.resize(instance.edge_count());
    std::iota(seq.begin(), seq.end(), 0);
  }
  std::vector<int> check = seq;
  std::sort(check.begin(), check.end());
  for (int e = 0; e < instance.edge_count(); ++e) {
    if (static_cast<int>(check.size()) != instance.edge_count() ||
        check[e] != e) {
      throw InputError("edge order must be a permutation of the edges");
    }
  }
  return seq;
}

}  // namespace

TreeInstance::TreeInstance(int nodes, std::vector<Edge> edges,
                           std::vector<double> costs)
    : nodes_(nodes), edges_(std::move(edges)), costs_(std::move(costs)) {
  if (nodes_ < 2) throw InputError("tree instance needs at least two nodes");
  if (nodes_ > kMaxTreeNodes) {
    throw CapExceeded("tree instance has " + std::to_string(nodes_) +
                      " nodes, above the cap of " +
                      std::to_string(kMaxTreeNodes));
  }
  if (costs_.size() != edges_.size()) {
    throw InputError("tree instance needs one cost per edge");
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    if (u < 0 || v < 0 || u >= nodes_ || v >= nodes_) {
      throw InputError("edge " + std::to_string(e) +
                       " has an endpoint out of range");
    }
    if (u == v) throw InputError("edge " + std::to_string(e) + " is a loop");
    if (!std::isfinite(costs_[e]) || costs_[e] < 0.0 || costs_[e] > 1.0) {
      std::ostringstream msg;
      msg << "cost of edge " << e << " is " << costs_[e]
          << ", outside [0, 1]";
      throw InputError(msg.str());
    }
  }
  if (!Connected(nodes_, edges_)) {
    throw InputError("tree instance graph is disconnected");
  }
}

std::vector<Edge> TreeInstance::CompleteEdges(int nodes) {
  std::vector<Edge> edges;
  for (int u = 0; u < nodes; ++u) {
    for (int v = u + 1; v < nodes; ++v) edges.push_back({u, v});
  }
  return edges;
}

TreeInstance TreeInstance::Complete(int nodes, std::vector<double> costs) {
  return TreeInstance(nodes, CompleteEdges(nodes), std::move(costs));
}

TreeInstance TreeInstance::WithCost(int edge, double cost) const {
  CheckEdge(*this, edge);
  std::vector<double> costs = costs_;
  costs[edge] = cost;
  return TreeInstance(nodes_, edges_, std::move(costs));
}

TreeInstance TreeInstance::WithCosts(std::vector<double> costs) const {
  return TreeInstance(nodes_, edges_, std::move(costs));
}

double TreeInstance::TreeCost(const EdgeSet& tree) const {
  double c = 0.0;
  for (int e : tree) c += costs_[e];
  return c;
}

double LogTreePartition(const TreeInstance& instance,
                        const PrivacyParams& params,
                        std::optional<int> zero_cost_edge) {
  CheckParams(instance, params);
  std::vector<double> log_weights = EdgeLogWeights(instance, params);
  if (zero_cost_edge) {
    CheckEdge(instance, *zero_cost_edge);
    log_weights[*zero_cost_edge] = 0.0;
  }
  return ConditionedGraph(instance, std::move(log_weights)).log_z();
}

double EdgeExclusionProbability(const TreeInstance& instance,
                                const PrivacyParams& params, int edge) {
  CheckParams(instance, params);
  CheckEdge(instance, edge);
  const auto [log_z, log_z_deleted] =
      LogPartitionWithDeletion(instance, params, edge);
  if (log_z_deleted == kNegInf) return 0.0;
  return std::clamp(std::exp(log_z_deleted - log_z), 0.0, 1.0);
}

double EdgeMarginal(const TreeInstance& instance, const PrivacyParams& params,
                    int edge) {
  CheckParams(instance, params);
  CheckEdge(instance, edge);
  const auto [log_z, log_z_deleted] =
      LogPartitionWithDeletion(instance, params, edge);
  if (log_z_deleted == kNegInf) return 1.0;
  return std::clamp(-std::expm1(log_z_deleted - log_z), 0.0, 1.0);
}

std::vector<double> EdgeMarginals(const TreeInstance& instance,
                                  const PrivacyParams& params) {
  std::vector<double> m(instance.edge_count());
  for (int e = 0; e < instance.edge_count(); ++e) {
    m[e] = EdgeMarginal(instance, params, e);
  }
  return m;
}

double TreeEntropy(const TreeInstance& instance, const PrivacyParams& params) {
  const std::vector<double> marginals = EdgeMarginals(instance, params);
  double expected_cost = 0.0;
  for (int e = 0; e < instance.edge_count(); ++e) {
    expected_cost += instance.cost(e) * marginals[e];
  }
  return std::max(0.0, LogTreePartition(instance, params) +
                           params.epsilon / 2.0 * expected_cost);
}

double ExpectedTotalCost(const TreeInstance& instance,
                         const PrivacyParams& params) {
  const std::vector<double> marginals = EdgeMarginals(instance, params);
  double total = 0.0;
  for (int e = 0; e < instance.edge_count(); ++e) {
    total += instance.cost(e) * marginals[e];
  }
  return total;
}

EdgeSet SampleTree(const TreeInstance& instance, const PrivacyParams& params,
                   Rng& rng, std::span<const int> order) {
  CheckParams(instance, params);
  ConditionedGraph graph(instance, EdgeLogWeights(instance, params));
  EdgeSet tree;
  for (int e : EdgeOrder(instance, order)) {
    if (static_cast<int>(tree.size()) == instance.nodes() - 1) break;
    const double p = graph.InclusionProbability(e);
    if (p > 0.0 && rng.Uniform() < p) {
      graph.Include(e);
      tree.push_back(e);
    } else {
      graph.Exclude(e);
    }
  }
  std::sort(tree.begin(), tree.end());
  if (!IsSpanningTree(instance, tree)) {
    throw NumericalError("conditional sampler did not produce a spanning tree");
  }
  return tree;
}

double TreeDecisionLogProbability(const TreeInstance& instance,
                                  const PrivacyParams& params,
                                  const EdgeSet& tree,
                                  std::span<const int> order) {
  CheckParams(instance, params);
  std::vector<bool> in_tree(instance.edge_count(), false);
  for (int e : tree) {
    CheckEdge(instance, e);
    in_tree[e] = true;
  }
  ConditionedGraph graph(instance, EdgeLogWeights(instance, params));
  double log_prob = 0.0;
  for (int e : EdgeOrder(instance, order)) {
    const double p = graph.InclusionProbability(e);
    if (in_tree[e]) {
      if (p <= 0.0) return kNegInf;
      log_prob += std::log(p);
      graph.Include(e);
    } else {
      if (p >= 1.0) return kNegInf;
      log_prob += std::log1p(-p);
      graph.Exclude(e);
    }
  }
  return log_prob;
}

TreePivot ParseTreePivot(std::string_view text) {
  if (text == "zero-cost") return TreePivot::kZeroCost;
  if (text == "highest-cost") return TreePivot::kHighestCost;
  throw InputError("unknown tree pivot '" + std::string(text) +
                   "' (expected zero-cost or highest-cost)");
}

std::string TreePivotName(TreePivot pivot) {
  return pivot == TreePivot::kZeroCost ? "zero-cost" : "highest-cost";
}

namespace {

double PivotLogPartition(const TreeInstance& instance,
                         const PrivacyParams& params, int edge,
                         TreePivot pivot) {
  if (pivot == TreePivot::kZeroCost) {
    return LogTreePartition(instance, params, edge);
  }
  return LogTreePartition(instance.WithCost(edge, 1.0), params);
}

// Transfer to `edge` given the shared Gibbs quantities.
double TransferFrom(const TreeInstance& instance, const PrivacyParams& params,
                    const std::vector<double>& marginals, double entropy,
                    int edge, TreePivot pivot) {
  double others_cost = 0.0;
  for (int e = 0; e < instance.edge_count(); ++e) {
    if (e != edge) others_cost += instance.cost(e) * marginals[e];
  }
  // Price with v_k = -c_k [k in T]: -E[sum_{k != i} v_k] - (2/eps) S
  // + (2/eps) ln Z_pivot, where Z_pivot sets agent i's cost to the pivot.
  const double price =
      others_cost - 2.0 / params.epsilon * entropy +
      2.0 / params.epsilon * PivotLogPartition(instance, params, edge, pivot);
  return -price;
}

}  // namespace

double TreePayment(const TreeInstance& instance, const PrivacyParams& params,
                   int edge, TreePivot pivot) {
  CheckParams(instance, params);
  CheckEdge(instance, edge);
  const std::vector<double> marginals = EdgeMarginals(instance, params);
  double expected_cost = 0.0;
  for (int e = 0; e < instance.edge_count(); ++e) {
    expected_cost += instance.cost(e) * marginals[e];
  }
  const double entropy = LogTreePartition(instance, params) +
                         params.epsilon / 2.0 * expected_cost;
  return TransferFrom(instance, params, marginals, entropy, edge, pivot);
}

std::vector<double> TreePayments(const TreeInstance& instance,
                                 const PrivacyParams& params,
                                 TreePivot pivot) {
  CheckParams(instance, params);
  const std::vector<double> marginals = EdgeMarginals(instance, params);
  double expected_cost = 0.0;
  for (int e = 0; e < instance.edge_count(); ++e) {
    expected_cost += instance.cost(e) * marginals[e];
  }
  const double entropy = LogTreePartition(instance, params) +
                         params.epsilon / 2.0 * expected_cost;
  std::vector<double> transfers(instance.edge_count());
  for (int i = 0; i < instance.edge_count(); ++i) {
    transfers[i] =
        TransferFrom(instance, params, marginals, entropy, i, pivot);
  }
  return transfers;
}

TreeRun RunTreeMechanism(const TreeInstance& instance,
                         const PrivacyParams& params, Rng& rng,
                         TreePivot pivot) {
  TreeRun run;
  run.tree = SampleTree(instance, params, rng);
  run.transfers = TreePayments(instance, params, pivot);
  run.cost = instance.TreeCost(run.tree);
  run.expected_cost = ExpectedTotalCost(instance, params);
  run.log_partition = LogTreePartition(instance, params);
  run.entropy = std::max(
      0.0, run.log_partition + params.epsilon / 2.0 * run.expected_cost);
  return run;
}

TreeInstance RandomCriticalInstance(int nodes, Rng& rng) {
  const std::vector<Edge> edges = TreeInstance::CompleteEdges(nodes);
  std::vector<double> costs(edges.size());
  const double critical = 1.0 / (2.0 * nodes);
  for (double& c : costs) c = rng.Uniform() < critical ? 0.0 : 1.0;
  return TreeInstance(nodes, edges, std::move(costs));
}

SpanningTree MinimumSpanningTree(const TreeInstance& instance) {
  std::vector<int> order(instance.edge_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return instance.cost(a) < instance.cost(b);
  });
  UnionFind uf(instance.nodes());
  SpanningTree mst;
  for (int e : order) {
    if (uf.Union(instance.edges()[e].u, instance.edges()[e].v)) {
      mst.edges.push_back(e);
      mst.cost += instance.cost(e);
    }
  }
  std::sort(mst.edges.begin(), mst.edges.end());
  return mst;
}

bool IsSpanningTree(const TreeInstance& instance, const EdgeSet& edges) {
  if (static_cast<int>(edges.size()) != instance.nodes() - 1) return false;
  UnionFind uf(instance.nodes());
  for (int e : edges) {
    if (e < 0 || e >= instance.edge_count()) return false;
    if (!uf.Union(instance.edges()[e].u, instance.edges()[e].v)) return false;
  }
  return true;
}

bool HasCriticalCycle(const TreeInstance& instance) {
  UnionFind uf(instance.nodes());
  for (int e = 0; e < instance.edge_count(); ++e) {
    if (instance.cost(e) != 0.0) continue;
    if (!uf.Union(instance.edges()[e].u, instance.edges()[e].v)) return true;
  }
  return false;
}

std::vector<EdgeSet> EnumerateSpanningTrees(const TreeInstance& instance) {
  const int m = instance.edge_count();
  const int size = instance.nodes() - 1;
  double subsets = 1.0;
  for (int k = 0; k < size; ++k) subsets = subsets * (m - k) / (k + 1);
  if (subsets > kMaxSubsets) {
    throw CapExceeded("too many edge subsets to enumerate spanning trees");
  }
  std::vector<EdgeSet> trees;
  EdgeSet pick(size);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    if (IsSpanningTree(instance, pick)) trees.push_back(pick);
    int k = size - 1;
    while (k >= 0 && pick[k] == m - size + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int r = k + 1; r < size; ++r) pick[r] = pick[r - 1] + 1;
  }
  return trees;
}

ValuationProfile ToExplicitProfile(const TreeInstance& instance) {
  const std::vector<EdgeSet> trees = EnumerateSpanningTrees(instance);
  const int m = instance.edge_count();
  const std::size_t outcomes = trees.size();
  std::vector<double> values(static_cast<std::size_t>(m) * outcomes, 0.0);
  std::vector<std::string> labels;
  labels.reserve(outcomes);
  for (std::size_t r = 0; r < outcomes; ++r) {
    std::string label;
    for (int e : trees[r]) {
      values[static_cast<std::size_t>(e) * outcomes + r] = -instance.cost(e);
      label += (label.empty() ? "" : ",") + std::to_string(e);
    }
    labels.push_back(std::move(label));
  }
  return ValuationProfile(m, static_cast<int>(outcomes), std::move(values),
                          ValueDomain::kCosts, std::move(labels));
}

BidEmbedding TreeEmbedding(const TreeInstance& instance) {
  auto trees = std::make_shared<const std::vector<EdgeSet>>(
      EnumerateSpanningTrees(instance));
  BidEmbedding e;
  e.dims = 1;
  e.low = 0.0;
  e.high = 1.0;
  e.embed = [trees](int agent, std::span<const double> bid) {
    std::vector<double> row(trees->size(), 0.0);
    for (std::size_t r = 0; r < trees->size(); ++r) {
      const EdgeSet& t = (*trees)[r];
      if (std::binary_search(t.begin(), t.end(), agent)) row[r] = -bid[0];
    }
    return row;
  };
  return e;
}

Mechanism TreeMechanism(const TreeInstance& graph, const PrivacyParams& params,
                        TreePivot pivot) {
  auto trees = std::make_shared<const std::vector<EdgeSet>>(
      EnumerateSpanningTrees(graph));
  return {"tree-determinant", [graph, params, trees, pivot](
                                  const ValuationProfile& bids) {
            if (bids.agents() != graph.edge_count() ||
                bids.outcomes() != static_cast<int>(trees->size())) {
              throw InputError("bids do not match the spanning-tree range");
            }
            std::vector<double> costs(graph.edge_count());
            for (int e = 0; e < graph.edge_count(); ++e) {
              double lowest = 0.0;
              for (double v : bids.row(e)) lowest = std::min(lowest, v);
              costs[e] = -lowest;
            }
            const TreeInstance instance = graph.WithCosts(costs);
            const double log_z = LogTreePartition(instance, params);
            MechanismEvaluation eval;
            eval.log_probs.resize(trees->size());
            eval.probs.resize(trees->size());
            for (std::size_t r = 0; r < trees->size(); ++r) {
              eval.log_probs[r] =
                  -params.epsilon / 2.0 * instance.TreeCost((*trees)[r]) -
                  log_z;
              eval.probs[r] = std::exp(eval.log_probs[r]);
            }
            eval.payments = TreePayments(instance, params, pivot);
            for (double& p : eval.payments) p = -p;
            return eval;
          }};
}

}  // namespace expmech
