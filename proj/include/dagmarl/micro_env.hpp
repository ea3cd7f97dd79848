#ifndef DAGMARL_MICRO_ENV_HPP_
#define DAGMARL_MICRO_ENV_HPP_

#include <vector>

#include "dagmarl/environment.hpp"
#include "dagmarl/rng.hpp"

namespace dagmarl {

// Tabular MDP-DAG small enough to enumerate. Node i's next state and, for
// sinks, its reward depend on the joint (state, action) of Delta(i). That
// joint tuple is a "context", indexed in mixed radix over Delta(i) in
// ascending node order, each node contributing s * A + a.
struct MicroDagSpec {
  DagSpec dag;
  std::vector<int> state_counts;
  std::vector<int> action_counts;
  std::vector<std::vector<double>> initial;                  // [node][state]
  std::vector<std::vector<std::vector<double>>> transition;  // [node][context][next state]
  std::vector<std::vector<double>> reward;                   // [node][context]; sinks only
  int horizon = 1;
};

class MicroDagEnv {
 public:
  static constexpr int kMaxNodes = 3;
  static constexpr int kMaxStates = 3;
  static constexpr int kMaxActions = 2;

  // Throws kInvalidDistribution for rows that are not distributions,
  // kConfigError for sizes beyond the limits or tables of the wrong shape.
  // Negative rewards are accepted; the theory checks reject them.
  explicit MicroDagEnv(MicroDagSpec spec);

  const DagTopology& topology() const { return topology_; }
  const MicroDagSpec& spec() const { return spec_; }
  int node_count() const { return topology_.node_count(); }
  int state_count(NodeId i) const { return spec_.state_counts[i]; }
  int action_count(NodeId i) const { return spec_.action_counts[i]; }
  int horizon() const { return spec_.horizon; }

  int context_count(NodeId i) const { return context_counts_[i]; }
  int context_index(NodeId i, std::span<const int> states, std::span<const int> actions) const;

  // Joint states and joint actions in mixed radix, node 0 most significant.
  int joint_state_count() const { return joint_states_; }
  int joint_action_count() const { return joint_actions_; }
  std::vector<int> decode_states(int joint) const;
  std::vector<int> decode_actions(int joint) const;

  double reward(NodeId sink, int context) const { return spec_.reward[sink][context]; }
  bool has_negative_reward() const;
  // Sum over sinks of the largest absolute per-step reward.
  double max_team_reward() const;
  // gamma^H * max_team_reward / (1 - gamma): bounds the value beyond H.
  double tail_bound(double gamma) const;

 private:
  MicroDagSpec spec_;
  DagTopology topology_;
  std::vector<int> context_counts_;
  int joint_states_ = 1;
  int joint_actions_ = 1;
};

struct RandomMicroOptions {
  int max_nodes = 3;
  int max_states = 3;
  int max_actions = 2;
  int horizon = 1;
};

// Random DAG, random stochastic tables, sink rewards uniform on [0, 1].
MicroDagEnv random_micro_env(Rng& rng, const RandomMicroOptions& options = {});
// Same, on a given topology of at most three nodes.
MicroDagEnv random_micro_env(Rng& rng, const DagTopology& topology,
                             const RandomMicroOptions& options = {});

// Environment-contract adapter: one-hot own state plus the step phase per
// node; team reward is the sum of sink rewards; episode lasts H steps.
struct MicroEnvState {
  std::vector<int> states;
  int step = 0;
  Rng rng;
  friend bool operator==(const MicroEnvState&, const MicroEnvState&) = default;
};

class MicroEnvironment : public StatefulEnvironment<MicroEnvState> {
 public:
  MicroEnvironment(MicroDagEnv model, int goal_period_length);

  std::string kind() const override { return "micro"; }
  uint64_t fingerprint() const override;
  const DagTopology& topology() const override { return model_.topology(); }
  std::vector<int> observation_dims() const override;
  std::vector<int> action_counts() const override { return model_.spec().action_counts; }
  int goal_period_length() const override { return goal_period_length_; }
  int max_steps() const override { return model_.horizon(); }

  void reset(uint64_t seed) override;
  StepResult step(std::span<const int> actions) override;
  std::vector<double> observe(NodeId node) const override;
  int step_index() const override { return state_.step; }
  bool done() const override { return state_.step >= model_.horizon(); }

  std::vector<std::string> invariant_violations() const override;
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<MicroEnvironment>(*this);
  }

  const MicroDagEnv& model() const { return model_; }

 private:
  MicroDagEnv model_;
  int goal_period_length_;
};

}  // namespace dagmarl

#endif  // DAGMARL_MICRO_ENV_HPP_
