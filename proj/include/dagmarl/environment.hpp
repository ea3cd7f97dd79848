#ifndef DAGMARL_ENVIRONMENT_HPP_
#define DAGMARL_ENVIRONMENT_HPP_

#include <any>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dagmarl/dag.hpp"
#include "dagmarl/error.hpp"

namespace dagmarl {

// Full copy of an environment's mutable state, RNG included. Only valid
// for an environment of the same kind and configuration.
struct EnvSnapshot {
  std::string kind;
  uint64_t fingerprint = 0;
  std::any state;
};

struct StepResult {
  double team_reward = 0.0;
  bool done = false;
};

// MDP-DAG environment: one subtask per DAG node, one discrete action per
// node per step, action 0 is always the node's no-op.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string kind() const = 0;
  // Identifies the configuration; snapshots only restore across equal
  // fingerprints.
  virtual uint64_t fingerprint() const = 0;
  virtual const DagTopology& topology() const = 0;
  virtual std::vector<int> observation_dims() const = 0;
  virtual std::vector<int> action_counts() const = 0;
  virtual int goal_period_length() const = 0;
  virtual int max_steps() const = 0;

  virtual void reset(uint64_t seed) = 0;
  // Throws kInvalidAction on a wrong action count or out-of-range index.
  virtual StepResult step(std::span<const int> actions) = 0;
  virtual std::vector<double> observe(NodeId node) const = 0;
  virtual int step_index() const = 0;
  virtual bool done() const = 0;

  virtual EnvSnapshot snapshot() const = 0;
  // Throws kVersionMismatch for a snapshot of another environment kind or
  // configuration.
  virtual void restore(const EnvSnapshot& snapshot) = 0;
  virtual bool same_state(const EnvSnapshot& snapshot) const = 0;

  // Human-readable descriptions of broken invariants; empty when healthy.
  virtual std::vector<std::string> invariant_violations() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;

  int node_count() const { return topology().node_count(); }
  // Concatenation of every node's observation, in node order.
  std::vector<double> global_state() const;
  int global_state_dim() const;

 protected:
  void check_actions(std::span<const int> actions) const;
};

// Snapshot plumbing shared by environments whose whole mutable state is
// one equality-comparable `State` value.
template <typename State>
class StatefulEnvironment : public Environment {
 public:
  EnvSnapshot snapshot() const override { return {kind(), fingerprint(), state_}; }

  void restore(const EnvSnapshot& snapshot) override { state_ = unpack(snapshot); }

  bool same_state(const EnvSnapshot& snapshot) const override {
    return unpack(snapshot) == state_;
  }

  const State& state() const { return state_; }

 protected:
  const State& unpack(const EnvSnapshot& snapshot) const {
    if (snapshot.kind != kind() || snapshot.fingerprint != fingerprint()) {
      fail(ErrorCode::kVersionMismatch,
           "snapshot of '" + snapshot.kind + "' does not fit this '" + kind() + "' environment");
    }
    const State* s = std::any_cast<State>(&snapshot.state);
    if (!s) fail(ErrorCode::kVersionMismatch, "snapshot payload has the wrong type");
    return *s;
  }

  State state_;
};

using EnvOverrides = std::map<std::string, std::string>;

// name: factory | logistics | prey | micro. Unknown names or override keys
// -> kConfigError. When `dag` is given it must equal the environment's
// topology, except for micro, which adopts it.
std::unique_ptr<Environment> make_environment(const std::string& name,
                                              const EnvOverrides& overrides,
                                              const std::optional<DagTopology>& dag = std::nullopt);

}  // namespace dagmarl

#endif  // DAGMARL_ENVIRONMENT_HPP_
