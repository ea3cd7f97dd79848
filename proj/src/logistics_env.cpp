#include "dagmarl/logistics_env.hpp"

#include "env_util.hpp"

namespace dagmarl {

namespace {

DagTopology logistics_topology() {
  DagSpec spec;
  spec.node_count = 5;
  spec.arcs = {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 4}, {3, 4}};
  spec.names = {"n1", "n2", "n3", "n4", "n5"};
  return DagTopology(std::move(spec));
}

constexpr double kUnits = 0.01;

bool is_source(NodeId node) { return node < 2; }

}  // namespace

LogisticsEnv::Outlet LogisticsEnv::outlet(NodeId node, int o) {
  static constexpr Outlet kTable[kNodes][2] = {
      {{false, 2}, {false, 3}},
      {{false, 2}, {false, 3}},
      {{false, 4}, {true, 0}},
      {{false, 4}, {true, 1}},
      {{true, 1}, {true, 2}},
  };
  return kTable[node][o];
}

LogisticsEnv::LogisticsEnv(LogisticsConfig config)
    : config_(config), topology_(logistics_topology()) {
  if (config_.goal_periods < 1 || config_.goal_period_length < 1) {
    fail(ErrorCode::kConfigError, "logistics: goal periods and period length must be positive");
  }
  if (!(config_.max_shipping_cost > 0.0)) {
    fail(ErrorCode::kConfigError, "logistics: max shipping cost must be positive");
  }
  for (int d = 0; d < kDestinations; ++d) {
    for (int p = 0; p < 2; ++p) {
      if (config_.demand_low[d][p] < 0 || config_.demand_low[d][p] > config_.demand_high[d][p]) {
        fail(ErrorCode::kConfigError, "logistics: demand bounds must satisfy 0 <= low <= high");
      }
    }
  }
  reset(0);
}

uint64_t LogisticsEnv::fingerprint() const {
  detail::FingerprintBuilder fp("logistics");
  fp.add(config_.goal_periods).add(config_.goal_period_length);
  for (double b : config_.benefit) fp.add(b);
  fp.add(config_.shortage_cost).add(config_.surplus_cost).add(config_.holding_cost);
  fp.add(config_.max_shipping_cost);
  for (int d = 0; d < kDestinations; ++d) {
    for (int p = 0; p < 2; ++p) fp.add(config_.demand_low[d][p]).add(config_.demand_high[d][p]);
  }
  return fp.value();
}

void LogisticsEnv::reset(uint64_t seed) {
  state_ = LogisticsState{};
  state_.rng = Rng(seed);
  for (auto& costs : state_.shipping_cost) {
    for (double& c : costs) c = config_.max_shipping_cost * uniform01(state_.rng);
  }
  for (int d = 0; d < kDestinations; ++d) {
    for (int p = 0; p < 2; ++p) {
      const int lo = config_.demand_low[d][p];
      const int span = config_.demand_high[d][p] - lo + 1;
      state_.demand[d][p] = lo + static_cast<int>(uniform_index(state_.rng, span));
    }
  }
}

StepResult LogisticsEnv::step(std::span<const int> actions) {
  check_actions(actions);
  if (done()) fail(ErrorCode::kInvalidArgument, "logistics: episode already finished");
  LogisticsState& s = state_;
  double reward = 0.0;

  // Every node ships at most one unit, judged on start-of-step stock, so
  // departures are settled before any arrival.
  struct Shipment {
    Outlet to;
    int product;
  };
  std::vector<Shipment> moving;
  for (NodeId node = 0; node < kNodes; ++node) {
    const int a = actions[node];
    if (a == 0) continue;
    int o = 0;
    int product = 0;
    if (is_source(node)) {
      o = a - 1;
      product = node;
      ++s.created[product];
    } else {
      o = (a - 1) / 2;
      product = (a - 1) % 2;
      if (s.inventory[node][product] < 1) continue;
      --s.inventory[node][product];
    }
    reward -= s.shipping_cost[node][o];
    moving.push_back({outlet(node, o), product});
  }
  for (const Shipment& m : moving) {
    if (m.to.to_destination) {
      ++s.delivered[m.to.index][m.product];
    } else {
      ++s.inventory[m.to.index][m.product];
    }
  }

  int held = 0;
  for (NodeId node = 2; node < kNodes; ++node) held += s.inventory[node][0] + s.inventory[node][1];
  reward -= config_.holding_cost * held;

  ++s.step;
  if (done()) reward += destination_settlement();
  return {reward, done()};
}

double LogisticsEnv::destination_settlement() const {
  double total = 0.0;
  for (int d = 0; d < kDestinations; ++d) {
    bool met = true;
    for (int p = 0; p < 2; ++p) {
      const int gap = state_.delivered[d][p] - state_.demand[d][p];
      if (gap < 0) {
        met = false;
        total -= config_.shortage_cost * -gap;
      } else {
        total -= config_.surplus_cost * gap;
      }
    }
    if (met) total += config_.benefit[d];
  }
  return total;
}

std::vector<double> LogisticsEnv::observe(NodeId node) const {
  if (node < 0 || node >= kNodes) {
    fail(ErrorCode::kInvalidNode, "logistics: no node " + std::to_string(node));
  }
  const LogisticsState& s = state_;
  const double phase = static_cast<double>(s.step) / max_steps();
  auto remaining = [&](int d, int p) {
    return std::max(0, s.demand[d][p] - s.delivered[d][p]) * kUnits;
  };
  const double c0 = s.shipping_cost[node][0] / config_.max_shipping_cost;
  const double c1 = s.shipping_cost[node][1] / config_.max_shipping_cost;
  switch (node) {
    case 0:
    case 1: {
      double total = 0.0;
      for (int d = 0; d < kDestinations; ++d) total += remaining(d, node);
      return {c0, c1, total, phase};
    }
    case 2:
    case 3: {
      const int d = node - 2;
      return {s.inventory[node][0] * kUnits, s.inventory[node][1] * kUnits, c0, c1,
              remaining(d, 0), remaining(d, 1), phase};
    }
    default:
      return {s.inventory[4][0] * kUnits, s.inventory[4][1] * kUnits, c0, c1,
              remaining(1, 0), remaining(1, 1), remaining(2, 0), remaining(2, 1), phase};
  }
}

std::vector<std::string> LogisticsEnv::invariant_violations() const {
  const LogisticsState& s = state_;
  std::vector<std::string> out;
  for (int p = 0; p < 2; ++p) {
    long in_network = 0;
    for (const auto& inv : s.inventory) {
      if (inv[p] < 0) out.push_back("negative node inventory");
      in_network += inv[p];
    }
    long arrived = 0;
    for (const auto& del : s.delivered) arrived += del[p];
    if (s.created[p] != in_network + arrived) {
      out.push_back("units created != units delivered + units in network");
    }
  }
  for (const auto& costs : s.shipping_cost) {
    for (double c : costs) {
      if (!(c >= 0.0 && c <= config_.max_shipping_cost)) out.push_back("shipping cost out of range");
    }
  }
  for (int d = 0; d < kDestinations; ++d) {
    for (int p = 0; p < 2; ++p) {
      if (s.demand[d][p] < config_.demand_low[d][p] || s.demand[d][p] > config_.demand_high[d][p]) {
        out.push_back("destination demand out of bounds");
      }
    }
  }
  return out;
}

}  // namespace dagmarl
