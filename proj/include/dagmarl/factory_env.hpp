#ifndef DAGMARL_FACTORY_ENV_HPP_
#define DAGMARL_FACTORY_ENV_HPP_

#include <array>

#include "dagmarl/environment.hpp"
#include "dagmarl/rng.hpp"

namespace dagmarl {

// Three-level production line, four machines:
//   node 0 (level 1)  makes part a or part b from nothing
//   node 1 (level 2)  makes B from {a, b}
//   node 2 (level 2)  makes C from {b}
//   node 3 (level 3)  makes final product 1 from {B}, 2 from {B, C}, 3 from {C}
// Arcs 0->1, 0->2, 1->3, 2->3. Every goal period the three finals get
// distinct values {2, 3, 4} and share a random total demand.
struct FactoryConfig {
  int goal_periods = 10;
  int goal_period_length = 40;
  int total_demand = 10;
  double holding_cost_level1 = 0.3;
  double holding_cost_level2 = 0.8;
  double overproduction_penalty = 1.0;
};

struct FactoryState {
  // a, b at node 0; B at node 1; C at node 2.
  int part_a = 0;
  int part_b = 0;
  int part_B = 0;
  int part_C = 0;
  std::array<int, 3> values{2, 3, 4};
  std::array<int, 3> demand{0, 0, 0};
  int step = 0;
  int period_overproduced = 0;
  // Cumulative bookkeeping for the demand-conservation invariant.
  long finals_produced = 0;
  long finals_credited = 0;
  long finals_surplus = 0;
  Rng rng;

  friend bool operator==(const FactoryState&, const FactoryState&) = default;
};

class FactoryEnv : public StatefulEnvironment<FactoryState> {
 public:
  enum Node { kLevel1 = 0, kMakerB = 1, kMakerC = 2, kAssembly = 3 };

  explicit FactoryEnv(FactoryConfig config = {});

  std::string kind() const override { return "factory"; }
  uint64_t fingerprint() const override;
  const DagTopology& topology() const override { return topology_; }
  std::vector<int> observation_dims() const override { return {3, 4, 3, 9}; }
  std::vector<int> action_counts() const override { return {3, 2, 2, 4}; }
  int goal_period_length() const override { return config_.goal_period_length; }
  int max_steps() const override { return config_.goal_periods * config_.goal_period_length; }

  void reset(uint64_t seed) override;
  StepResult step(std::span<const int> actions) override;
  std::vector<double> observe(NodeId node) const override;
  int step_index() const override { return state_.step; }
  bool done() const override { return state_.step >= max_steps(); }

  std::vector<std::string> invariant_violations() const override;
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<FactoryEnv>(*this);
  }

  const FactoryConfig& config() const { return config_; }
  // Test hook: overwrite the state wholesale.
  void set_state(const FactoryState& s) { state_ = s; }

 private:
  void draw_period();

  FactoryConfig config_;
  DagTopology topology_;
};

}  // namespace dagmarl

#endif  // DAGMARL_FACTORY_ENV_HPP_
