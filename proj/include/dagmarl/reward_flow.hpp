#ifndef DAGMARL_REWARD_FLOW_HPP_
#define DAGMARL_REWARD_FLOW_HPP_

#include <span>
#include <vector>

#include "dagmarl/dag.hpp"

namespace dagmarl {

// Action of the reward generator and distributor. arc_values[k] belongs to
// task arc k = (u -> v) and is read in reward orientation: v passes share
// to its task predecessor u.
struct RgdOutput {
  double q = 0.0;
  std::vector<double> node_values;
  std::vector<double> arc_values;
};

// Average team reward and goal-period count of the preceding episode.
struct RewardBaseline {
  double mean_total_reward = 0.0;
  double mean_goal_periods = 1.0;
};

struct ShareTable {
  std::vector<double> node_share;     // sh^i
  std::vector<double> arc_share;      // sh^{v,u} per task arc (u -> v)
  std::vector<double> initial_share;  // pre-split share per node
};

// M = q * R / N; zero for the initial baseline (R = 0). A negative
// episode total is clamped to zero so the budget never goes negative.
double synthetic_budget(double q, const RewardBaseline& baseline);

// Initial shares of the sinks, proportional to their node values; uniform
// when every sink value is zero. Indexed like topology.sinks().
std::vector<double> sink_initial_shares(const DagTopology& topology,
                                        std::span<const double> node_values);

struct SplitShare {
  double self = 0.0;
  std::vector<double> to_recipients;  // one per entry of e_row
};

// Splits `initial_share` between the node and its reward recipients in
// proportion to (node_value, e_row...). With an all-zero denominator the
// share is split uniformly over the 1 + |e_row| recipients.
SplitShare split_share(double initial_share, double node_value,
                       std::span<const double> e_row);

ShareTable compute_shares(const DagTopology& topology, const RgdOutput& output);

// Synthetic reward per node, sr^i = sh^i * budget. Shares are computed in
// reverse topological order, sinks first.
std::vector<double> distribute(const DagTopology& topology, const RgdOutput& output,
                               double budget);

// Keeps only the latest episode.
RewardBaseline update_baseline(const RewardBaseline& baseline,
                               double episode_total_reward, int episode_goal_periods);

}  // namespace dagmarl

#endif  // DAGMARL_REWARD_FLOW_HPP_
