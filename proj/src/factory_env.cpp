#include "dagmarl/factory_env.hpp"

#include <numeric>

#include "env_util.hpp"

namespace dagmarl {

namespace {

DagTopology factory_topology() {
  DagSpec spec;
  spec.node_count = 4;
  spec.arcs = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  spec.names = {"parts", "maker_B", "maker_C", "assembly"};
  return DagTopology(std::move(spec));
}

}  // namespace

FactoryEnv::FactoryEnv(FactoryConfig config)
    : config_(config), topology_(factory_topology()) {
  if (config_.goal_periods < 1 || config_.goal_period_length < 1 || config_.total_demand < 0) {
    fail(ErrorCode::kConfigError, "factory: goal periods, period length and demand must be positive");
  }
  reset(0);
}

uint64_t FactoryEnv::fingerprint() const {
  return detail::FingerprintBuilder("factory")
      .add(config_.goal_periods)
      .add(config_.goal_period_length)
      .add(config_.total_demand)
      .add(config_.holding_cost_level1)
      .add(config_.holding_cost_level2)
      .add(config_.overproduction_penalty)
      .value();
}

void FactoryEnv::reset(uint64_t seed) {
  state_ = FactoryState{};
  state_.rng = Rng(seed);
  draw_period();
}

void FactoryEnv::draw_period() {
  // Distinct values: a uniform permutation of {2, 3, 4}.
  state_.values = {2, 3, 4};
  for (int k = 2; k > 0; --k) {
    std::swap(state_.values[k], state_.values[uniform_index(state_.rng, k + 1)]);
  }
  // Uniform weak composition of the total over three products (stars and
  // bars: two distinct bar positions among total + 2 slots).
  const uint64_t slots = static_cast<uint64_t>(config_.total_demand) + 2;
  uint64_t pick = uniform_index(state_.rng, slots * (slots - 1) / 2);
  uint64_t first = 0;
  while (pick >= slots - 1 - first) {
    pick -= slots - 1 - first;
    ++first;
  }
  const uint64_t second = first + 1 + pick;
  state_.demand = {static_cast<int>(first), static_cast<int>(second - first - 1),
                   static_cast<int>(slots - 1 - second)};
}

StepResult FactoryEnv::step(std::span<const int> actions) {
  check_actions(actions);
  if (done()) fail(ErrorCode::kInvalidArgument, "factory: episode already finished");
  FactoryState& s = state_;
  double reward = 0.0;

  // Consumers work from start-of-step stock: assembly, then level 2 in
  // index order, then level 1. Output lands after its consumers ran.
  int final_product = -1;
  switch (actions[kAssembly]) {
    case 1:
      if (s.part_B >= 1) { --s.part_B; final_product = 0; }
      break;
    case 2:
      if (s.part_B >= 1 && s.part_C >= 1) { --s.part_B; --s.part_C; final_product = 1; }
      break;
    case 3:
      if (s.part_C >= 1) { --s.part_C; final_product = 2; }
      break;
    default:
      break;
  }
  if (final_product >= 0) {
    ++s.finals_produced;
    if (s.demand[final_product] > 0) {
      --s.demand[final_product];
      ++s.finals_credited;
      reward += s.values[final_product];
    } else {
      ++s.finals_surplus;
      ++s.period_overproduced;
    }
  }
  if (actions[kMakerB] == 1 && s.part_a >= 1 && s.part_b >= 1) {
    --s.part_a;
    --s.part_b;
    ++s.part_B;
  }
  if (actions[kMakerC] == 1 && s.part_b >= 1) {
    --s.part_b;
    ++s.part_C;
  }
  if (actions[kLevel1] == 1) ++s.part_a;
  if (actions[kLevel1] == 2) ++s.part_b;

  reward -= config_.holding_cost_level1 * (s.part_a + s.part_b) +
            config_.holding_cost_level2 * (s.part_B + s.part_C);

  ++s.step;
  if (s.step % config_.goal_period_length == 0) {
    reward -= config_.overproduction_penalty * s.period_overproduced;
    s.period_overproduced = 0;
    if (!done()) draw_period();
  }
  return {reward, done()};
}

std::vector<double> FactoryEnv::observe(NodeId node) const {
  const FactoryState& s = state_;
  const double phase =
      static_cast<double>(s.step % config_.goal_period_length) / config_.goal_period_length;
  constexpr double kCount = 0.1;
  switch (node) {
    case kLevel1:
      return {s.part_a * kCount, s.part_b * kCount, phase};
    case kMakerB:
      return {s.part_a * kCount, s.part_b * kCount, s.part_B * kCount, phase};
    case kMakerC:
      return {s.part_b * kCount, s.part_C * kCount, phase};
    case kAssembly:
      return {s.part_B * kCount,       s.part_C * kCount,       s.demand[0] * kCount,
              s.demand[1] * kCount,    s.demand[2] * kCount,    s.values[0] / 4.0,
              s.values[1] / 4.0,       s.values[2] / 4.0,       phase};
    default:
      fail(ErrorCode::kInvalidNode, "factory: no node " + std::to_string(node));
  }
}

std::vector<std::string> FactoryEnv::invariant_violations() const {
  const FactoryState& s = state_;
  std::vector<std::string> out;
  if (s.part_a < 0 || s.part_b < 0 || s.part_B < 0 || s.part_C < 0) {
    out.push_back("negative inventory");
  }
  for (int d : s.demand) {
    if (d < 0) out.push_back("negative remaining demand");
  }
  if (std::accumulate(s.demand.begin(), s.demand.end(), 0) > config_.total_demand) {
    out.push_back("remaining demand exceeds the per-period total");
  }
  if (s.finals_credited + s.finals_surplus != s.finals_produced) {
    out.push_back("credited + surplus finals != finals produced");
  }
  auto v = s.values;
  std::sort(v.begin(), v.end());
  if (v != std::array<int, 3>{2, 3, 4}) out.push_back("product values not a permutation of {2,3,4}");
  return out;
}

}  // namespace dagmarl
