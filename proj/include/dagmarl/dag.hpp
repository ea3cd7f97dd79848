#ifndef DAGMARL_DAG_HPP_
#define DAGMARL_DAG_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace dagmarl {

using NodeId = int;
using NodeSet = std::vector<NodeId>;  // always sorted ascending

// Task arc u -> v: acting at u affects the state of v.
struct Arc {
  NodeId from = 0;
  NodeId to = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

struct DagSpec {
  int node_count = 0;
  std::vector<Arc> arcs;
  std::vector<std::string> names;  // optional, cosmetic
};

using TopologicalOrder = std::vector<NodeId>;

// Kahn's algorithm with a min-heap frontier, so ties between ready nodes
// go to the smallest index. Throws kEmptyGraph, kInvalidNode, kInvalidArc
// (duplicate arc) or kCycleDetected; the cycle message lists one cycle.
TopologicalOrder validate(const DagSpec& spec);

// Immutable, validated DAG with every closure precomputed.
class DagTopology {
 public:
  explicit DagTopology(DagSpec spec);

  int node_count() const { return spec_.node_count; }
  int arc_count() const { return static_cast<int>(spec_.arcs.size()); }
  const std::vector<Arc>& arcs() const { return spec_.arcs; }
  const Arc& arc(int index) const { return spec_.arcs[index]; }
  const std::string& name(NodeId i) const;
  const DagSpec& spec() const { return spec_; }
  const TopologicalOrder& order() const { return order_; }

  // Delta(i): nodes with a directed path to i, plus i.
  const NodeSet& ancestors(NodeId i) const;
  // Upsilon(i): nodes reachable from i, plus i.
  const NodeSet& descendants(NodeId i) const;
  // Omega(i) = Delta(i) u Upsilon(i).
  const NodeSet& influence(NodeId i) const;

  bool is_ancestor(NodeId u, NodeId i) const;  // u in Delta(i)

  const NodeSet& predecessors(NodeId i) const;  // direct task parents
  const NodeSet& successors(NodeId i) const;    // direct task children

  // Task arcs entering i, as indices into arcs().
  const std::vector<int>& incoming_arcs(NodeId i) const;

  const NodeSet& sources() const { return sources_; }
  const NodeSet& sinks() const { return sinks_; }
  bool is_sink(NodeId i) const;

  // Rewards flow against task arcs. `recipients` is delta(i), the nodes i
  // passes share to (its task predecessors); `senders` is ch(i), the nodes
  // that pass share to i (its task successors).
  struct RewardFlow {
    NodeSet recipients;
    NodeSet senders;
  };
  RewardFlow reward_flow_neighbors(NodeId i) const;

  // Index of the task arc u -> v, or -1.
  int find_arc(NodeId from, NodeId to) const;

  // Builds from node names and name pairs; unknown names -> kInvalidNode.
  static DagTopology from_names(
      const std::vector<std::string>& names,
      const std::vector<std::pair<std::string, std::string>>& arcs);

 private:
  void check_node(NodeId i) const;

  DagSpec spec_;
  TopologicalOrder order_;
  std::vector<NodeSet> preds_;
  std::vector<NodeSet> succs_;
  std::vector<std::vector<int>> in_arcs_;
  std::vector<NodeSet> ancestors_;
  std::vector<NodeSet> descendants_;
  std::vector<NodeSet> influence_;
  std::vector<std::vector<char>> ancestor_matrix_;
  NodeSet sources_;
  NodeSet sinks_;
};

}  // namespace dagmarl

#endif  // DAGMARL_DAG_HPP_
