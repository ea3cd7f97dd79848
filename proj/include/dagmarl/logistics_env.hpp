#ifndef DAGMARL_LOGISTICS_ENV_HPP_
#define DAGMARL_LOGISTICS_ENV_HPP_

#include <array>

#include "dagmarl/environment.hpp"
#include "dagmarl/rng.hpp"

namespace dagmarl {

// Five shipping nodes and three destinations.
//   n1 (node 0) ships A to n3 or n4      n2 (node 1) ships B to n3 or n4
//   n3 (node 2) ships to n5 or d1        n4 (node 3) ships to n5 or d2
//   n5 (node 4) ships to d2 or d3
// Sources create units on demand. Everything else ships from stock.
struct LogisticsConfig {
  int goal_periods = 30;
  int goal_period_length = 10;
  std::array<double, 3> benefit{100.0, 300.0, 200.0};
  double shortage_cost = 8.0;
  double surplus_cost = 3.0;
  double holding_cost = 0.3;
  double max_shipping_cost = 0.3;
  // [destination][product] inclusive integer bounds.
  std::array<std::array<int, 2>, 3> demand_low{{{5, 3}, {110, 70}, {35, 80}}};
  std::array<std::array<int, 2>, 3> demand_high{{{10, 7}, {130, 90}, {45, 100}}};
};

struct LogisticsState {
  std::array<std::array<int, 2>, 5> inventory{};  // [node][product]
  std::array<std::array<int, 2>, 3> delivered{};  // [destination][product]
  std::array<std::array<int, 2>, 3> demand{};
  std::array<std::array<double, 2>, 5> shipping_cost{};  // [node][outlet]
  std::array<long, 2> created{};
  int step = 0;
  Rng rng;

  friend bool operator==(const LogisticsState&, const LogisticsState&) = default;
};

class LogisticsEnv : public StatefulEnvironment<LogisticsState> {
 public:
  static constexpr int kNodes = 5;
  static constexpr int kDestinations = 3;

  // Where outlet o of a node leads: another node, or a destination.
  struct Outlet {
    bool to_destination = false;
    int index = 0;
  };
  static Outlet outlet(NodeId node, int o);

  explicit LogisticsEnv(LogisticsConfig config = {});

  std::string kind() const override { return "logistics"; }
  uint64_t fingerprint() const override;
  const DagTopology& topology() const override { return topology_; }
  std::vector<int> observation_dims() const override { return {4, 4, 7, 7, 9}; }
  // Sources: idle, or ship their product to outlet 0/1. Others: idle, or
  // 1 + 2 * outlet + product.
  std::vector<int> action_counts() const override { return {3, 3, 5, 5, 5}; }
  int goal_period_length() const override { return config_.goal_period_length; }
  int max_steps() const override { return config_.goal_periods * config_.goal_period_length; }

  void reset(uint64_t seed) override;
  StepResult step(std::span<const int> actions) override;
  std::vector<double> observe(NodeId node) const override;
  int step_index() const override { return state_.step; }
  bool done() const override { return state_.step >= max_steps(); }

  std::vector<std::string> invariant_violations() const override;
  std::unique_ptr<Environment> clone() const override {
    return std::make_unique<LogisticsEnv>(*this);
  }

  const LogisticsConfig& config() const { return config_; }
  void set_state(const LogisticsState& s) { state_ = s; }
  // End-of-episode destination accounting for the current deliveries.
  double destination_settlement() const;

 private:
  LogisticsConfig config_;
  DagTopology topology_;
};

}  // namespace dagmarl

#endif  // DAGMARL_LOGISTICS_ENV_HPP_
