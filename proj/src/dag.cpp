#include "dagmarl/dag.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

#include "dagmarl/error.hpp"

namespace dagmarl {

namespace {

std::string describe_cycle(const std::vector<NodeId>& cycle) {
  std::ostringstream out;
  out << "cycle detected: ";
  for (size_t k = 0; k < cycle.size(); ++k) {
    if (k) out << " -> ";
    out << cycle[k];
  }
  return out.str();
}

// Walks backwards through nodes left over by Kahn's algorithm. Every such
// node still has a leftover predecessor, so the walk must revisit a node.
std::vector<NodeId> find_cycle(int n, const std::vector<Arc>& arcs,
                               const std::vector<int>& in_degree) {
  std::vector<NodeId> pred(n, -1);
  for (const Arc& a : arcs) {
    if (in_degree[a.from] > 0 && in_degree[a.to] > 0 && pred[a.to] < 0) {
      pred[a.to] = a.from;
    }
  }
  NodeId start = 0;
  while (in_degree[start] == 0) ++start;
  std::vector<int> seen(n, -1);
  std::vector<NodeId> walk;
  NodeId cur = start;
  while (seen[cur] < 0) {
    seen[cur] = static_cast<int>(walk.size());
    walk.push_back(cur);
    cur = pred[cur];
  }
  std::vector<NodeId> cycle(walk.begin() + seen[cur], walk.end());
  std::reverse(cycle.begin(), cycle.end());
  cycle.push_back(cycle.front());
  return cycle;
}

}  // namespace

TopologicalOrder validate(const DagSpec& spec) {
  const int n = spec.node_count;
  if (n <= 0) fail(ErrorCode::kEmptyGraph, "graph has no nodes");
  if (!spec.names.empty() && static_cast<int>(spec.names.size()) != n) {
    fail(ErrorCode::kInvalidArgument, "names must be empty or one per node");
  }
  std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
  std::vector<int> in_degree(n, 0);
  std::vector<std::vector<NodeId>> out(n);
  for (const Arc& a : spec.arcs) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n) {
      fail(ErrorCode::kInvalidNode, "arc references node outside 0.." +
                                        std::to_string(n - 1));
    }
    if (a.from == a.to) {
      fail(ErrorCode::kCycleDetected,
           describe_cycle({a.from, a.from}) + " (self-loop)");
    }
    if (present[a.from][a.to]) {
      fail(ErrorCode::kInvalidArc, "duplicate arc " + std::to_string(a.from) +
                                       " -> " + std::to_string(a.to));
    }
    present[a.from][a.to] = 1;
    ++in_degree[a.to];
    out[a.from].push_back(a.to);
  }

  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId i = 0; i < n; ++i) {
    if (in_degree[i] == 0) ready.push(i);
  }
  TopologicalOrder order;
  order.reserve(n);
  while (!ready.empty()) {
    NodeId u = ready.top();
    ready.pop();
    order.push_back(u);
    for (NodeId v : out[u]) {
      if (--in_degree[v] == 0) ready.push(v);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    fail(ErrorCode::kCycleDetected,
         describe_cycle(find_cycle(n, spec.arcs, in_degree)));
  }
  return order;
}

DagTopology::DagTopology(DagSpec spec) : spec_(std::move(spec)) {
  order_ = validate(spec_);
  const int n = spec_.node_count;
  preds_.assign(n, {});
  succs_.assign(n, {});
  in_arcs_.assign(n, {});
  for (int k = 0; k < arc_count(); ++k) {
    const Arc& a = spec_.arcs[k];
    preds_[a.to].push_back(a.from);
    succs_[a.from].push_back(a.to);
    in_arcs_[a.to].push_back(k);
  }
  for (int i = 0; i < n; ++i) {
    std::sort(preds_[i].begin(), preds_[i].end());
    std::sort(succs_[i].begin(), succs_[i].end());
    if (preds_[i].empty()) sources_.push_back(i);
    if (succs_[i].empty()) sinks_.push_back(i);
  }

  // ancestor_matrix_[i][u] == 1 iff u in Delta(i); filled in topological
  // order so each node's parents are complete before the node itself.
  ancestor_matrix_.assign(n, std::vector<char>(n, 0));
  for (NodeId i : order_) {
    ancestor_matrix_[i][i] = 1;
    for (NodeId p : preds_[i]) {
      for (int u = 0; u < n; ++u) {
        if (ancestor_matrix_[p][u]) ancestor_matrix_[i][u] = 1;
      }
    }
  }
  ancestors_.assign(n, {});
  descendants_.assign(n, {});
  influence_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int u = 0; u < n; ++u) {
      if (ancestor_matrix_[i][u]) ancestors_[i].push_back(u);
      if (ancestor_matrix_[u][i]) descendants_[i].push_back(u);
      if (ancestor_matrix_[i][u] || ancestor_matrix_[u][i]) {
        influence_[i].push_back(u);
      }
    }
  }
}

void DagTopology::check_node(NodeId i) const {
  if (i < 0 || i >= spec_.node_count) {
    fail(ErrorCode::kInvalidNode, "node " + std::to_string(i) +
                                      " outside 0.." +
                                      std::to_string(spec_.node_count - 1));
  }
}

const std::string& DagTopology::name(NodeId i) const {
  static const std::string kEmpty;
  check_node(i);
  return spec_.names.empty() ? kEmpty : spec_.names[i];
}

const NodeSet& DagTopology::ancestors(NodeId i) const {
  check_node(i);
  return ancestors_[i];
}

const NodeSet& DagTopology::descendants(NodeId i) const {
  check_node(i);
  return descendants_[i];
}

const NodeSet& DagTopology::influence(NodeId i) const {
  check_node(i);
  return influence_[i];
}

bool DagTopology::is_ancestor(NodeId u, NodeId i) const {
  check_node(u);
  check_node(i);
  return ancestor_matrix_[i][u] != 0;
}

const NodeSet& DagTopology::predecessors(NodeId i) const {
  check_node(i);
  return preds_[i];
}

const NodeSet& DagTopology::successors(NodeId i) const {
  check_node(i);
  return succs_[i];
}

const std::vector<int>& DagTopology::incoming_arcs(NodeId i) const {
  check_node(i);
  return in_arcs_[i];
}

bool DagTopology::is_sink(NodeId i) const {
  check_node(i);
  return succs_[i].empty();
}

DagTopology::RewardFlow DagTopology::reward_flow_neighbors(NodeId i) const {
  check_node(i);
  return RewardFlow{preds_[i], succs_[i]};
}

int DagTopology::find_arc(NodeId from, NodeId to) const {
  for (int k = 0; k < arc_count(); ++k) {
    if (spec_.arcs[k].from == from && spec_.arcs[k].to == to) return k;
  }
  return -1;
}

DagTopology DagTopology::from_names(
    const std::vector<std::string>& names,
    const std::vector<std::pair<std::string, std::string>>& arcs) {
  DagSpec spec;
  spec.node_count = static_cast<int>(names.size());
  spec.names = names;
  auto lookup = [&](const std::string& s) {
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) fail(ErrorCode::kInvalidNode, "unknown node '" + s + "'");
    return static_cast<NodeId>(it - names.begin());
  };
  for (const auto& [u, v] : arcs) spec.arcs.push_back({lookup(u), lookup(v)});
  return DagTopology(std::move(spec));
}

}  // namespace dagmarl
