#ifndef DAGMARL_PREY_ENV_HPP_
#define DAGMARL_PREY_ENV_HPP_

#include <array>

#include "dagmarl/environment.hpp"
#include "dagmarl/rng.hpp"

namespace dagmarl {

// Hierarchical predator-prey on a square grid. Prey tree 0 -> 1 -> {2, 3};
// only the sink preys 2 and 3 can be caught. Each prey stays within a
// Chebyshev box of `leash` cells around its parent.
struct PreyConfig {
  int grid_size = 20;
  int predators = 2;
  int leash = 5;
  int max_steps = 200;
  int goal_period_length = 10;
  // Steps each predator spends on its random initial heading before it
  // starts chasing.
  int wander_steps = 25;
};

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct PreyState {
  std::array<Cell, 4> prey{};
  std::array<bool, 4> alive{true, true, true, true};
  std::vector<Cell> predator;
  std::vector<int> heading;  // index into the 8 king moves
  int step = 0;
  Rng rng;

  friend bool operator==(const PreyState&, const PreyState&) = default;
};

class PreyEnv : public StatefulEnvironment<PreyState> {
 public:
  static constexpr int kPreys = 4;
  // Action 0 stays; 1..8 are the king moves N, NE, E, SE, S, SW, W, NW.
  static Cell move_delta(int action);

  explicit PreyEnv(PreyConfig config = {});

  std::string kind() const override { return "prey"; }
  uint64_t fingerprint() const override;
  const DagTopology& topology() const override { return topology_; }
  std::vector<int> observation_dims() const override { return {8, 8, 8, 8}; }
  std::vector<int> action_counts() const override { return {9, 9, 9, 9}; }
  int goal_period_length() const override { return config_.goal_period_length; }
  int max_steps() const override { return config_.max_steps; }

  void reset(uint64_t seed) override;
  StepResult step(std::span<const int> actions) override;
  std::vector<double> observe(NodeId node) const override;
  int step_index() const override { return state_.step; }
  bool done() const override;

  std::vector<std::string> invariant_violations() const override;
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<PreyEnv>(*this);
  }

  const PreyConfig& config() const { return config_; }
  void set_state(const PreyState& s) { state_ = s; }
  int living_sinks() const;

 private:
  Cell clamp_prey(NodeId node, Cell c) const;
  void catch_preys();
  void move_predators();

  PreyConfig config_;
  DagTopology topology_;
};

}  // namespace dagmarl

#endif  // DAGMARL_PREY_ENV_HPP_
