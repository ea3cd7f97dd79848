#include "dagmarl/micro_env.hpp"

#include <cmath>

#include "env_util.hpp"

namespace dagmarl {

namespace {

void check_distribution(const std::vector<double>& row, size_t size, const std::string& what) {
  if (row.size() != size) {
    fail(ErrorCode::kConfigError, what + " has " + std::to_string(row.size()) +
                                      " entries, expected " + std::to_string(size));
  }
  double total = 0.0;
  for (double p : row) {
    if (!std::isfinite(p) || p < 0.0) {
      fail(ErrorCode::kInvalidDistribution, what + " has a negative or non-finite entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorCode::kInvalidDistribution, what + " sums to " + std::to_string(total));
  }
}

std::vector<double> random_distribution(Rng& rng, int size) {
  std::vector<double> row(size);
  double total = 0.0;
  for (double& p : row) {
    p = -std::log1p(-uniform01(rng));
    total += p;
  }
  if (total <= 0.0) {
    row.assign(size, 1.0 / size);
    return row;
  }
  for (double& p : row) p /= total;
  return row;
}

int sample(Rng& rng, const std::vector<double>& dist) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (size_t s = 0; s + 1 < dist.size(); ++s) {
    acc += dist[s];
    if (u < acc) return static_cast<int>(s);
  }
  return static_cast<int>(dist.size()) - 1;
}

}  // namespace

MicroDagEnv::MicroDagEnv(MicroDagSpec spec) : spec_(std::move(spec)), topology_(spec_.dag) {
  const int n = topology_.node_count();
  if (n > kMaxNodes) fail(ErrorCode::kConfigError, "micro env: at most 3 nodes");
  if (spec_.horizon < 1) fail(ErrorCode::kConfigError, "micro env: horizon must be >= 1");
  if (static_cast<int>(spec_.state_counts.size()) != n ||
      static_cast<int>(spec_.action_counts.size()) != n ||
      static_cast<int>(spec_.initial.size()) != n ||
      static_cast<int>(spec_.transition.size()) != n ||
      static_cast<int>(spec_.reward.size()) != n) {
    fail(ErrorCode::kConfigError, "micro env: every table needs one entry per node");
  }
  for (NodeId i = 0; i < n; ++i) {
    if (spec_.state_counts[i] < 1 || spec_.state_counts[i] > kMaxStates ||
        spec_.action_counts[i] < 1 || spec_.action_counts[i] > kMaxActions) {
      fail(ErrorCode::kConfigError, "micro env: 1..3 states and 1..2 actions per node");
    }
    joint_states_ *= spec_.state_counts[i];
    joint_actions_ *= spec_.action_counts[i];
  }
  context_counts_.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    int count = 1;
    for (NodeId j : topology_.ancestors(i)) count *= spec_.state_counts[j] * spec_.action_counts[j];
    context_counts_[i] = count;
    const std::string node = "node " + std::to_string(i);
    check_distribution(spec_.initial[i], spec_.state_counts[i], node + " initial distribution");
    if (static_cast<int>(spec_.transition[i].size()) != count) {
      fail(ErrorCode::kConfigError, node + ": one transition row per context");
    }
    for (const auto& row : spec_.transition[i]) {
      check_distribution(row, spec_.state_counts[i], node + " transition row");
    }
    const bool sink = topology_.is_sink(i);
    const size_t expected = sink ? static_cast<size_t>(count) : 0;
    if (spec_.reward[i].size() != expected) {
      fail(ErrorCode::kConfigError,
           node + (sink ? ": one reward per context" : ": only sinks carry rewards"));
    }
    for (double r : spec_.reward[i]) {
      if (!std::isfinite(r)) fail(ErrorCode::kConfigError, node + ": non-finite reward");
    }
  }
}

int MicroDagEnv::context_index(NodeId i, std::span<const int> states,
                               std::span<const int> actions) const {
  int index = 0;
  for (NodeId j : topology_.ancestors(i)) {
    index = index * spec_.state_counts[j] * spec_.action_counts[j] +
            states[j] * spec_.action_counts[j] + actions[j];
  }
  return index;
}

std::vector<int> MicroDagEnv::decode_states(int joint) const {
  std::vector<int> out(node_count());
  for (int i = node_count() - 1; i >= 0; --i) {
    out[i] = joint % spec_.state_counts[i];
    joint /= spec_.state_counts[i];
  }
  return out;
}

std::vector<int> MicroDagEnv::decode_actions(int joint) const {
  std::vector<int> out(node_count());
  for (int i = node_count() - 1; i >= 0; --i) {
    out[i] = joint % spec_.action_counts[i];
    joint /= spec_.action_counts[i];
  }
  return out;
}

bool MicroDagEnv::has_negative_reward() const {
  for (const auto& row : spec_.reward) {
    for (double r : row) {
      if (r < 0.0) return true;
    }
  }
  return false;
}

double MicroDagEnv::max_team_reward() const {
  double total = 0.0;
  for (const auto& row : spec_.reward) {
    double best = 0.0;
    for (double r : row) best = std::max(best, std::abs(r));
    total += best;
  }
  return total;
}

double MicroDagEnv::tail_bound(double gamma) const {
  if (!(gamma >= 0.0 && gamma < 1.0)) fail(ErrorCode::kInvalidArgument, "gamma must be in [0, 1)");
  return std::pow(gamma, spec_.horizon) * max_team_reward() / (1.0 - gamma);
}

MicroDagEnv random_micro_env(Rng& rng, const DagTopology& topology,
                             const RandomMicroOptions& options) {
  MicroDagSpec spec;
  spec.dag = topology.spec();
  spec.horizon = options.horizon;
  const int n = topology.node_count();
  for (NodeId i = 0; i < n; ++i) {
    spec.state_counts.push_back(1 + static_cast<int>(uniform_index(rng, options.max_states)));
    spec.action_counts.push_back(1 + static_cast<int>(uniform_index(rng, options.max_actions)));
  }
  for (NodeId i = 0; i < n; ++i) {
    int contexts = 1;
    for (NodeId j : topology.ancestors(i)) contexts *= spec.state_counts[j] * spec.action_counts[j];
    spec.initial.push_back(random_distribution(rng, spec.state_counts[i]));
    std::vector<std::vector<double>> rows;
    for (int c = 0; c < contexts; ++c) rows.push_back(random_distribution(rng, spec.state_counts[i]));
    spec.transition.push_back(std::move(rows));
    std::vector<double> rewards;
    if (topology.is_sink(i)) {
      for (int c = 0; c < contexts; ++c) rewards.push_back(uniform01(rng));
    }
    spec.reward.push_back(std::move(rewards));
  }
  return MicroDagEnv(std::move(spec));
}

MicroDagEnv random_micro_env(Rng& rng, const RandomMicroOptions& options) {
  DagSpec dag;
  dag.node_count = 1 + static_cast<int>(uniform_index(rng, options.max_nodes));
  for (NodeId u = 0; u < dag.node_count; ++u) {
    for (NodeId v = u + 1; v < dag.node_count; ++v) {
      if (uniform01(rng) < 0.5) dag.arcs.push_back({u, v});
    }
  }
  return random_micro_env(rng, DagTopology(std::move(dag)), options);
}

MicroEnvironment::MicroEnvironment(MicroDagEnv model, int goal_period_length)
    : model_(std::move(model)), goal_period_length_(goal_period_length) {
  if (goal_period_length_ < 1) fail(ErrorCode::kConfigError, "micro: goal period length must be >= 1");
  reset(0);
}

uint64_t MicroEnvironment::fingerprint() const {
  const MicroDagSpec& spec = model_.spec();
  detail::FingerprintBuilder fp("micro");
  fp.add(goal_period_length_).add(spec.horizon).add(spec.dag.node_count);
  for (const Arc& a : spec.dag.arcs) fp.add(a.from).add(a.to);
  for (int i = 0; i < spec.dag.node_count; ++i) {
    fp.add(spec.state_counts[i]).add(spec.action_counts[i]);
    for (double p : spec.initial[i]) fp.add(p);
    for (const auto& row : spec.transition[i]) {
      for (double p : row) fp.add(p);
    }
    for (double r : spec.reward[i]) fp.add(r);
  }
  return fp.value();
}

std::vector<int> MicroEnvironment::observation_dims() const {
  std::vector<int> dims;
  for (int s : model_.spec().state_counts) dims.push_back(s + 1);
  return dims;
}

void MicroEnvironment::reset(uint64_t seed) {
  state_ = MicroEnvState{};
  state_.rng = Rng(seed);
  for (const auto& dist : model_.spec().initial) state_.states.push_back(sample(state_.rng, dist));
}

StepResult MicroEnvironment::step(std::span<const int> actions) {
  check_actions(actions);
  if (done()) fail(ErrorCode::kInvalidArgument, "micro: episode already finished");
  const int n = model_.node_count();
  double reward = 0.0;
  std::vector<int> next(n);
  for (NodeId i = 0; i < n; ++i) {
    const int ctx = model_.context_index(i, state_.states, actions);
    if (model_.topology().is_sink(i)) reward += model_.reward(i, ctx);
    next[i] = sample(state_.rng, model_.spec().transition[i][ctx]);
  }
  state_.states = std::move(next);
  ++state_.step;
  return {reward, done()};
}

std::vector<double> MicroEnvironment::observe(NodeId node) const {
  if (node < 0 || node >= model_.node_count()) {
    fail(ErrorCode::kInvalidNode, "micro: no node " + std::to_string(node));
  }
  std::vector<double> obs(model_.state_count(node) + 1, 0.0);
  obs[state_.states[node]] = 1.0;
  obs.back() = static_cast<double>(state_.step) / model_.horizon();
  return obs;
}

std::vector<std::string> MicroEnvironment::invariant_violations() const {
  std::vector<std::string> out;
  for (NodeId i = 0; i < model_.node_count(); ++i) {
    if (state_.states[i] < 0 || state_.states[i] >= model_.state_count(i)) {
      out.push_back("micro node state out of range");
    }
  }
  return out;
}

}  // namespace dagmarl
