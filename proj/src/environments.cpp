#include <algorithm>
#include <charconv>
#include <functional>

#include "dagmarl/environment.hpp"
#include "dagmarl/factory_env.hpp"
#include "dagmarl/logistics_env.hpp"
#include "dagmarl/micro_env.hpp"
#include "dagmarl/prey_env.hpp"

namespace dagmarl {

std::vector<double> Environment::global_state() const {
  std::vector<double> out;
  for (NodeId i = 0; i < node_count(); ++i) {
    const std::vector<double> obs = observe(i);
    out.insert(out.end(), obs.begin(), obs.end());
  }
  return out;
}

int Environment::global_state_dim() const {
  int total = 0;
  for (int d : observation_dims()) total += d;
  return total;
}

void Environment::check_actions(std::span<const int> actions) const {
  const std::vector<int> counts = action_counts();
  if (actions.size() != counts.size()) {
    fail(ErrorCode::kInvalidAction, kind() + ": expected " + std::to_string(counts.size()) +
                                        " actions, got " + std::to_string(actions.size()));
  }
  for (size_t i = 0; i < counts.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= counts[i]) {
      fail(ErrorCode::kInvalidAction, kind() + ": action " + std::to_string(actions[i]) +
                                          " out of range for node " + std::to_string(i));
    }
  }
}

namespace {

// Applies string overrides onto typed fields; every key must be known.
class OverrideBinder {
 public:
  OverrideBinder(std::string env, const EnvOverrides& overrides)
      : env_(std::move(env)), overrides_(overrides) {}

  OverrideBinder& bind(const std::string& key, int& field) {
    known_.push_back(key);
    if (auto it = overrides_.find(key); it != overrides_.end()) field = parse<int>(key, it->second);
    return *this;
  }
  OverrideBinder& bind(const std::string& key, double& field) {
    known_.push_back(key);
    if (auto it = overrides_.find(key); it != overrides_.end()) field = parse<double>(key, it->second);
    return *this;
  }
  OverrideBinder& bind(const std::string& key, uint64_t& field) {
    known_.push_back(key);
    if (auto it = overrides_.find(key); it != overrides_.end()) {
      field = parse<uint64_t>(key, it->second);
    }
    return *this;
  }
  bool has(const std::string& key) const { return overrides_.count(key) > 0; }

  void finish() const {
    for (const auto& [key, value] : overrides_) {
      if (std::find(known_.begin(), known_.end(), key) == known_.end()) {
        fail(ErrorCode::kConfigError, env_ + ": unknown environment setting '" + key + "'");
      }
    }
  }

 private:
  template <typename T>
  T parse(const std::string& key, const std::string& text) const {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      fail(ErrorCode::kConfigError, env_ + ": bad value '" + text + "' for '" + key + "'");
    }
    return value;
  }

  std::string env_;
  const EnvOverrides& overrides_;
  std::vector<std::string> known_;
};

bool same_graph(const DagTopology& a, const DagTopology& b) {
  if (a.node_count() != b.node_count() || a.arc_count() != b.arc_count()) return false;
  for (const Arc& arc : a.arcs()) {
    if (b.find_arc(arc.from, arc.to) < 0) return false;
  }
  return true;
}

// Two-node chain 0 -> 1, one state each, two actions each; the sink pays
// `reward` when both nodes choose action 1 (or always, when `constant`).
MicroDagEnv default_micro_model(int horizon, double reward, bool constant) {
  MicroDagSpec spec;
  spec.dag.node_count = 2;
  spec.dag.arcs = {{0, 1}};
  spec.state_counts = {1, 1};
  spec.action_counts = {2, 2};
  spec.initial = {{1.0}, {1.0}};
  spec.transition = {std::vector<std::vector<double>>(2, {1.0}),
                     std::vector<std::vector<double>>(4, {1.0})};
  // Context of the sink: (s0, a0, s1, a1) -> a0 * 2 + a1.
  spec.reward = {{}, constant ? std::vector<double>(4, reward)
                              : std::vector<double>{0.0, 0.0, 0.0, reward}};
  spec.horizon = horizon;
  return MicroDagEnv(std::move(spec));
}

}  // namespace

std::unique_ptr<Environment> make_environment(const std::string& name,
                                              const EnvOverrides& overrides,
                                              const std::optional<DagTopology>& dag) {
  std::unique_ptr<Environment> env;
  if (name == "factory") {
    FactoryConfig c;
    OverrideBinder(name, overrides)
        .bind("goal_periods", c.goal_periods)
        .bind("goal_period_length", c.goal_period_length)
        .bind("total_demand", c.total_demand)
        .bind("holding_cost_level1", c.holding_cost_level1)
        .bind("holding_cost_level2", c.holding_cost_level2)
        .bind("overproduction_penalty", c.overproduction_penalty)
        .finish();
    env = std::make_unique<FactoryEnv>(c);
  } else if (name == "logistics") {
    LogisticsConfig c;
    OverrideBinder(name, overrides)
        .bind("goal_periods", c.goal_periods)
        .bind("goal_period_length", c.goal_period_length)
        .bind("shortage_cost", c.shortage_cost)
        .bind("surplus_cost", c.surplus_cost)
        .bind("holding_cost", c.holding_cost)
        .bind("max_shipping_cost", c.max_shipping_cost)
        .finish();
    env = std::make_unique<LogisticsEnv>(c);
  } else if (name == "prey") {
    PreyConfig c;
    OverrideBinder(name, overrides)
        .bind("grid_size", c.grid_size)
        .bind("predators", c.predators)
        .bind("leash", c.leash)
        .bind("max_steps", c.max_steps)
        .bind("goal_period_length", c.goal_period_length)
        .bind("wander_steps", c.wander_steps)
        .finish();
    env = std::make_unique<PreyEnv>(c);
  } else if (name == "micro") {
    int horizon = 20;
    int period = 5;
    double reward = 1.0;
    uint64_t model_seed = 1;
    OverrideBinder binder(name, overrides);
    binder.bind("horizon", horizon)
        .bind("goal_period_length", period)
        .bind("reward", reward)
        .bind("model_seed", model_seed);
    const bool constant = binder.has("constant_reward");
    double constant_reward = 0.0;
    binder.bind("constant_reward", constant_reward).finish();
    if (dag) {
      Rng rng(model_seed);
      RandomMicroOptions options;
      options.horizon = horizon;
      env = std::make_unique<MicroEnvironment>(random_micro_env(rng, *dag, options), period);
      return env;
    }
    env = std::make_unique<MicroEnvironment>(
        default_micro_model(horizon, constant ? constant_reward : reward, constant), period);
    return env;
  } else {
    fail(ErrorCode::kConfigError,
         "unknown environment '" + name + "' (expected factory, logistics, prey or micro)");
  }
  if (dag && !same_graph(*dag, env->topology())) {
    fail(ErrorCode::kConfigError, "the configured DAG does not match the " + name + " environment");
  }
  return env;
}

}  // namespace dagmarl
