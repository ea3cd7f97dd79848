#include "dagmarl/reward_flow.hpp"

#include <algorithm>
#include <cmath>

#include "dagmarl/error.hpp"

namespace dagmarl {

namespace {

double unit_clamp(double x) { return std::isnan(x) ? 0.0 : std::clamp(x, 0.0, 1.0); }

}  // namespace

double synthetic_budget(double q, const RewardBaseline& baseline) {
  if (baseline.mean_goal_periods < 1.0) {
    fail(ErrorCode::kInvalidArgument, "baseline goal-period count must be >= 1");
  }
  const double r = std::max(0.0, baseline.mean_total_reward);
  return unit_clamp(q) * r / baseline.mean_goal_periods;
}

std::vector<double> sink_initial_shares(const DagTopology& topology,
                                        std::span<const double> node_values) {
  if (static_cast<int>(node_values.size()) != topology.node_count()) {
    fail(ErrorCode::kDimensionMismatch, "need one node value per node");
  }
  const NodeSet& sinks = topology.sinks();
  double total = 0.0;
  for (NodeId k : sinks) total += unit_clamp(node_values[k]);
  std::vector<double> out(sinks.size());
  for (size_t s = 0; s < sinks.size(); ++s) {
    out[s] = total > 0.0 ? unit_clamp(node_values[sinks[s]]) / total
                         : 1.0 / static_cast<double>(sinks.size());
  }
  return out;
}

SplitShare split_share(double initial_share, double node_value,
                       std::span<const double> e_row) {
  SplitShare out;
  out.to_recipients.resize(e_row.size());
  const double v = unit_clamp(node_value);
  double denom = v;
  for (double e : e_row) denom += unit_clamp(e);
  if (denom > 0.0) {
    out.self = initial_share * v / denom;
    for (size_t j = 0; j < e_row.size(); ++j) {
      out.to_recipients[j] = initial_share * unit_clamp(e_row[j]) / denom;
    }
  } else {
    const double each = initial_share / static_cast<double>(1 + e_row.size());
    out.self = each;
    std::fill(out.to_recipients.begin(), out.to_recipients.end(), each);
  }
  return out;
}

ShareTable compute_shares(const DagTopology& topology, const RgdOutput& output) {
  const int n = topology.node_count();
  if (static_cast<int>(output.node_values.size()) != n ||
      static_cast<int>(output.arc_values.size()) != topology.arc_count()) {
    fail(ErrorCode::kInvalidTopology,
         "RGD output needs one value per node and one per arc of the topology");
  }
  ShareTable table;
  table.node_share.assign(n, 0.0);
  table.arc_share.assign(topology.arc_count(), 0.0);
  table.initial_share.assign(n, 0.0);

  const std::vector<double> sink_shares = sink_initial_shares(topology, output.node_values);
  for (size_t s = 0; s < topology.sinks().size(); ++s) {
    table.initial_share[topology.sinks()[s]] = sink_shares[s];
  }

  const TopologicalOrder& order = topology.order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId i = *it;
    // All task successors come later in topological order, so their arc
    // shares toward i are final by now.
    if (!topology.is_sink(i)) {
      double inflow = 0.0;
      for (NodeId child : topology.successors(i)) {
        inflow += table.arc_share[topology.find_arc(i, child)];
      }
      table.initial_share[i] = inflow;
    }
    const std::vector<int>& in_arcs = topology.incoming_arcs(i);
    std::vector<double> e_row;
    e_row.reserve(in_arcs.size());
    for (int k : in_arcs) e_row.push_back(output.arc_values[k]);
    const SplitShare split = split_share(table.initial_share[i], output.node_values[i], e_row);
    table.node_share[i] = split.self;
    for (size_t j = 0; j < in_arcs.size(); ++j) {
      table.arc_share[in_arcs[j]] = split.to_recipients[j];
    }
  }
  return table;
}

std::vector<double> distribute(const DagTopology& topology, const RgdOutput& output,
                               double budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    fail(ErrorCode::kInvalidArgument, "synthetic budget must be finite and >= 0");
  }
  ShareTable table = compute_shares(topology, output);
  std::vector<double> sr(table.node_share.size());
  for (size_t i = 0; i < sr.size(); ++i) sr[i] = table.node_share[i] * budget;
  return sr;
}

RewardBaseline update_baseline(const RewardBaseline& /*baseline*/,
                               double episode_total_reward, int episode_goal_periods) {
  if (episode_goal_periods < 1) {
    fail(ErrorCode::kInvalidArgument, "an episode has at least one goal period");
  }
  return RewardBaseline{episode_total_reward, static_cast<double>(episode_goal_periods)};
}

}  // namespace dagmarl
