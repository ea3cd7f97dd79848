#include <set>

#include "dagmarl/factory_env.hpp"
#include "dagmarl/logistics_env.hpp"
#include "dagmarl/micro_env.hpp"
#include "dagmarl/prey_env.hpp"
#include "test_support.hpp"

namespace dagmarl {
namespace {

std::vector<int> random_actions(const Environment& env, Rng& rng) {
  std::vector<int> a;
  for (int n : env.action_counts()) a.push_back(static_cast<int>(uniform_index(rng, n)));
  return a;
}

std::vector<std::unique_ptr<Environment>> all_environments() {
  std::vector<std::unique_ptr<Environment>> envs;
  for (const char* name : {"factory", "logistics", "prey", "micro"}) envs.push_back(make_environment(name, {}));
  Rng rng(3);
  envs.push_back(std::make_unique<MicroEnvironment>(random_micro_env(rng, {3, 3, 2, 30}), 5));
  return envs;
}

// Observation snapshot of every node, used to compare trajectories.
std::vector<std::vector<double>> observe_all(const Environment& env) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < env.node_count(); ++i) out.push_back(env.observe(i));
  return out;
}

TEST(EnvironmentContract, DeclaredShapes) {
  for (const auto& env : all_environments()) {
    SCOPED_TRACE(env->kind());
    env->reset(17);
    const std::vector<int> dims = env->observation_dims();
    ASSERT_EQ(static_cast<int>(dims.size()), env->node_count());
    ASSERT_EQ(static_cast<int>(env->action_counts().size()), env->node_count());
    for (int i = 0; i < env->node_count(); ++i) {
      EXPECT_EQ(static_cast<int>(env->observe(i).size()), dims[i]);
    }
    EXPECT_EQ(static_cast<int>(env->global_state().size()), env->global_state_dim());
    EXPECT_EQ(env->step_index(), 0);
  }
}

TEST(EnvironmentContract, InvalidActions) {
  for (const auto& env : all_environments()) {
    SCOPED_TRACE(env->kind());
    env->reset(1);
    std::vector<int> a(env->node_count(), 0);
    a.back() = env->action_counts().back();
    EXPECT_DAGMARL_ERROR(env->step(a), ErrorCode::kInvalidAction);
    a.back() = -1;
    EXPECT_DAGMARL_ERROR(env->step(a), ErrorCode::kInvalidAction);
    EXPECT_DAGMARL_ERROR(env->step(std::vector<int>(env->node_count() + 1, 0)), ErrorCode::kInvalidAction);
    EXPECT_EQ(env->step_index(), 0);
  }
}

TEST(EnvironmentContract, SameSeedSameTrajectory) {
  for (const auto& env : all_environments()) {
    SCOPED_TRACE(env->kind());
    const std::unique_ptr<Environment> twin = env->clone();
    env->reset(99);
    twin->reset(99);
    EXPECT_TRUE(env->same_state(twin->snapshot()));
    Rng rng(4);
    while (!env->done()) {
      const std::vector<int> a = random_actions(*env, rng);
      const StepResult r1 = env->step(a);
      const StepResult r2 = twin->step(a);
      ASSERT_EQ(r1.team_reward, r2.team_reward);
      ASSERT_EQ(r1.done, r2.done);
      ASSERT_EQ(observe_all(*env), observe_all(*twin));
    }
  }
}

TEST(EnvironmentContract, SnapshotRoundTrip) {
  for (const auto& env : all_environments()) {
    SCOPED_TRACE(env->kind());
    env->reset(5);
    Rng rng(6);
    for (int i = 0; i < 3 && !env->done(); ++i) env->step(random_actions(*env, rng));
    const EnvSnapshot snap = env->snapshot();
    std::vector<std::vector<int>> actions;
    std::vector<double> rewards;
    for (int i = 0; i < 10 && !env->done(); ++i) {
      actions.push_back(random_actions(*env, rng));
      rewards.push_back(env->step(actions.back()).team_reward);
    }
    const EnvSnapshot end = env->snapshot();
    env->restore(snap);
    EXPECT_TRUE(env->same_state(snap));
    for (size_t i = 0; i < actions.size(); ++i) ASSERT_EQ(env->step(actions[i]).team_reward, rewards[i]);
    EXPECT_TRUE(env->same_state(end));
  }
}

TEST(EnvironmentContract, DivergentActionsAfterRestoreDiverge) {
  for (const char* name : {"factory", "logistics", "prey"}) {
    SCOPED_TRACE(name);
    const std::unique_ptr<Environment> env = make_environment(name, {});
    env->reset(8);
    const EnvSnapshot snap = env->snapshot();
    Rng r1(1);
    for (int i = 0; i < 10; ++i) env->step(random_actions(*env, r1));
    const EnvSnapshot first = env->snapshot();
    env->restore(snap);
    Rng r2(2);
    for (int i = 0; i < 10; ++i) env->step(random_actions(*env, r2));
    EXPECT_FALSE(env->same_state(first));
  }
}

TEST(EnvironmentContract, ForeignSnapshotsAreRejected) {
  const std::unique_ptr<Environment> factory = make_environment("factory", {});
  const std::unique_ptr<Environment> other = make_environment("factory", {{"total_demand", "12"}});
  const std::unique_ptr<Environment> prey = make_environment("prey", {});
  EXPECT_DAGMARL_ERROR(other->restore(factory->snapshot()), ErrorCode::kVersionMismatch);
  EXPECT_DAGMARL_ERROR(prey->restore(factory->snapshot()), ErrorCode::kVersionMismatch);
  EXPECT_DAGMARL_ERROR(prey->same_state(factory->snapshot()), ErrorCode::kVersionMismatch);
}

TEST(EnvironmentContract, RandomActionsKeepInvariants) {
  for (const auto& env : all_environments()) {
    SCOPED_TRACE(env->kind());
    Rng rng(12);
    uint64_t episode = 0;
    env->reset(episode);
    for (int t = 0; t < 10000; ++t) {
      if (env->done()) env->reset(++episode);
      env->step(random_actions(*env, rng));
      const auto bad = env->invariant_violations();
      ASSERT_TRUE(bad.empty()) << bad.front() << " at step " << t;
    }
  }
}

TEST(EnvironmentContract, StepAfterDoneFails) {
  const std::unique_ptr<Environment> env = make_environment("micro", {{"horizon", "2"}});
  env->reset(0);
  env->step(std::vector<int>{0, 0});
  env->step(std::vector<int>{0, 0});
  ASSERT_TRUE(env->done());
  EXPECT_THROW(env->step(std::vector<int>{0, 0}), Error);
}

TEST(MakeEnvironment, Errors) {
  EXPECT_DAGMARL_ERROR(make_environment("warehouse", {}), ErrorCode::kConfigError);
  EXPECT_DAGMARL_ERROR(make_environment("factory", {{"bogus", "1"}}), ErrorCode::kConfigError);
  EXPECT_DAGMARL_ERROR(make_environment("factory", {{"goal_periods", "ten"}}), ErrorCode::kConfigError);
  const DagTopology chain = DagTopology::from_names({"a", "b"}, {{"a", "b"}});
  EXPECT_DAGMARL_ERROR(make_environment("factory", {}, chain), ErrorCode::kConfigError);
  EXPECT_EQ(make_environment("micro", {}, chain)->topology().arcs(), chain.arcs());
}

// Factory

FactoryState idle_state(const FactoryEnv& env) {
  FactoryState s = env.state();
  s.part_a = s.part_b = s.part_B = s.part_C = 0;
  return s;
}

TEST(Factory, ResetDrawsValidPeriod) {
  FactoryEnv env;
  std::set<std::array<int, 3>> seen;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    env.reset(seed);
    auto v = env.state().values;
    seen.insert(v);
    std::sort(v.begin(), v.end());
    EXPECT_EQ(v, (std::array<int, 3>{2, 3, 4}));
    const auto& d = env.state().demand;
    EXPECT_EQ(d[0] + d[1] + d[2], 10);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Factory, DemandCompositionIsUniform) {
  // 66 weak compositions of 10 into 3 parts, each equally likely.
  FactoryEnv env;
  std::map<std::array<int, 3>, int> counts;
  const int n = 66000;
  for (int seed = 0; seed < n; ++seed) {
    env.reset(static_cast<uint64_t>(seed));
    ++counts[env.state().demand];
  }
  EXPECT_EQ(counts.size(), 66u);
  const double sigma = std::sqrt(1000.0 * (65.0 / 66.0));
  for (const auto& [d, c] : counts) EXPECT_NEAR(c, 1000.0, 5.0 * sigma);
}

TEST(Factory, ValueFourFinalEarnsFour) {
  FactoryEnv env;
  FactoryState s = idle_state(env);
  s.values = {4, 2, 3};
  s.demand = {1, 5, 4};
  s.part_B = 1;
  env.set_state(s);
  EXPECT_DOUBLE_EQ(env.step(std::vector<int>{0, 0, 0, 1}).team_reward, 4.0);
  EXPECT_EQ(env.state().demand[0], 0);
  EXPECT_EQ(env.state().part_B, 0);
}

TEST(Factory, LevelTwoHoldingCost) {
  FactoryEnv env;
  FactoryState s = idle_state(env);
  s.part_B = 2;
  env.set_state(s);
  EXPECT_NEAR(env.step(std::vector<int>{0, 0, 0, 0}).team_reward, -1.6, 1e-12);
}

TEST(Factory, LevelOneHoldingCost) {
  FactoryEnv env;
  FactoryState s = idle_state(env);
  env.set_state(s);
  EXPECT_NEAR(env.step(std::vector<int>{1, 0, 0, 0}).team_reward, -0.3, 1e-12);
}

TEST(Factory, AllIdleEpisodeEarnsNothing) {
  FactoryEnv env;
  env.reset(3);
  double total = 0.0;
  int steps = 0;
  while (!env.done()) {
    total += env.step(std::vector<int>{0, 0, 0, 0}).team_reward;
    ++steps;
  }
  EXPECT_EQ(total, 0.0);
  EXPECT_EQ(steps, 400);
}

TEST(Factory, MissingPartsMakeActionIdle) {
  FactoryEnv env;
  env.set_state(idle_state(env));
  const FactoryState before = env.state();
  EXPECT_EQ(env.step(std::vector<int>{0, 1, 1, 2}).team_reward, 0.0);
  EXPECT_EQ(env.state().finals_produced, before.finals_produced);
  EXPECT_EQ(env.state().part_B, 0);
}

TEST(Factory, OverproductionPenaltyAtPeriodEnd) {
  FactoryEnv env;
  FactoryState s = idle_state(env);
  s.values = {2, 3, 4};
  s.demand = {0, 5, 5};
  s.part_B = 1;
  s.step = 38;
  env.set_state(s);
  EXPECT_DOUBLE_EQ(env.step(std::vector<int>{0, 0, 0, 1}).team_reward, 0.0);
  EXPECT_EQ(env.state().finals_surplus, 1);
  // Step 40 closes the goal period and charges the surplus unit.
  EXPECT_DOUBLE_EQ(env.step(std::vector<int>{0, 0, 0, 0}).team_reward, -1.0);
  EXPECT_EQ(env.state().period_overproduced, 0);
  EXPECT_EQ(env.state().demand[0] + env.state().demand[1] + env.state().demand[2], 10);
}

TEST(Factory, FullProductionChain) {
  FactoryEnv env;
  FactoryState s = idle_state(env);
  s.values = {2, 3, 4};
  s.demand = {0, 10, 0};
  env.set_state(s);
  // a, b, b; then B from (a, b) and C from b; then final 2 from (B, C).
  env.step(std::vector<int>{1, 0, 0, 0});
  env.step(std::vector<int>{2, 0, 0, 0});
  env.step(std::vector<int>{2, 0, 0, 0});
  env.step(std::vector<int>{0, 1, 1, 0});
  EXPECT_EQ(env.state().part_B, 1);
  EXPECT_EQ(env.state().part_C, 1);
  const StepResult r = env.step(std::vector<int>{0, 0, 0, 2});
  EXPECT_DOUBLE_EQ(r.team_reward, 3.0);
  EXPECT_EQ(env.state().demand[1], 9);
}

// Logistics

TEST(Logistics, ResetDrawsWithinTable) {
  LogisticsEnv env;
  int lo = 1000, hi = -1;
  for (uint64_t seed = 0; seed < 500; ++seed) {
    env.reset(seed);
    const int d = env.state().demand[1][0];
    EXPECT_GE(d, 110);
    EXPECT_LE(d, 130);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    for (const auto& costs : env.state().shipping_cost) {
      for (double c : costs) {
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 0.3);
      }
    }
  }
  EXPECT_EQ(lo, 110);
  EXPECT_EQ(hi, 130);
}

LogisticsState final_step_state(const LogisticsEnv& env) {
  LogisticsState s = env.state();
  for (auto& c : s.shipping_cost) c = {0.0, 0.0};
  s.delivered = s.demand;
  s.step = env.max_steps() - 1;
  return s;
}

TEST(Logistics, AllDemandMetIsSixHundred) {
  LogisticsEnv env;
  env.reset(4);
  env.set_state(final_step_state(env));
  const StepResult r = env.step(std::vector<int>(5, 0));
  EXPECT_TRUE(r.done);
  EXPECT_DOUBLE_EQ(r.team_reward, 600.0);
}

TEST(Logistics, OneUnitShortAtDestinationThree) {
  LogisticsEnv env;
  env.reset(4);
  LogisticsState s = final_step_state(env);
  --s.delivered[2][1];
  env.set_state(s);
  // The unmet destination forfeits its benefit and pays 8 for the unit.
  EXPECT_DOUBLE_EQ(env.step(std::vector<int>(5, 0)).team_reward, 600.0 - 200.0 - 8.0);
}

TEST(Logistics, SurplusUnitCostsThree) {
  LogisticsEnv env;
  env.reset(4);
  LogisticsState s = final_step_state(env);
  ++s.delivered[0][0];
  env.set_state(s);
  EXPECT_DOUBLE_EQ(env.step(std::vector<int>(5, 0)).team_reward, 597.0);
}

TEST(Logistics, InactionPaysOnlyShortage) {
  LogisticsEnv env;
  env.reset(9);
  double total = 0.0;
  while (!env.done()) total += env.step(std::vector<int>(5, 0)).team_reward;
  int units = 0;
  for (const auto& d : env.state().demand) units += d[0] + d[1];
  EXPECT_DOUBLE_EQ(total, -8.0 * units);
}

TEST(Logistics, ShippingAndHoldingCosts) {
  LogisticsEnv env;
  env.reset(2);
  const LogisticsState s = env.state();
  // n1 ships A to n3; n3 then holds one unit.
  const StepResult r = env.step(std::vector<int>{1, 0, 0, 0, 0});
  EXPECT_NEAR(r.team_reward, -s.shipping_cost[0][0] - 0.3, 1e-12);
  EXPECT_EQ(env.state().inventory[2][0], 1);
  // n3 forwards it to d1 (outlet 1, product A -> action 1 + 2 * 1 + 0).
  const StepResult r2 = env.step(std::vector<int>{0, 0, 3, 0, 0});
  EXPECT_NEAR(r2.team_reward, -s.shipping_cost[2][1], 1e-12);
  EXPECT_EQ(env.state().delivered[0][0], 1);
}

TEST(Logistics, ShippingWithoutStockIsIdle) {
  LogisticsEnv env;
  env.reset(2);
  EXPECT_EQ(env.step(std::vector<int>{0, 0, 1, 2, 4}).team_reward, 0.0);
}

TEST(Logistics, OutletsMatchTopology) {
  LogisticsEnv env;
  const DagTopology& dag = env.topology();
  for (NodeId n = 0; n < LogisticsEnv::kNodes; ++n) {
    for (int o = 0; o < 2; ++o) {
      const auto out = LogisticsEnv::outlet(n, o);
      if (!out.to_destination) EXPECT_GE(dag.find_arc(n, out.index), 0);
    }
  }
  EXPECT_EQ(dag.arc_count(), 6);
  EXPECT_EQ(dag.sinks(), (NodeSet{4}));
}

// Prey

TEST(Prey, BothSinksSurviveWholeEpisode) {
  // Predators wander along grid lines and the diagonal from their corners
  // and never reach the preys, which stay put off the diagonal.
  PreyConfig c;
  c.wander_steps = 1000;
  PreyEnv env(c);
  env.reset(6);
  double total = 0.0;
  while (!env.done()) total += env.step(std::vector<int>(4, 0)).team_reward;
  EXPECT_EQ(env.step_index(), 200);
  EXPECT_EQ(total, 400.0);
}

TEST(Prey, AllSinksCaughtEndsEpisode) {
  PreyConfig c;
  c.wander_steps = 0;
  PreyEnv env(c);
  env.reset(1);
  PreyState s = env.state();
  s.step = 49;
  s.prey = {Cell{10, 10}, Cell{10, 11}, Cell{9, 12}, Cell{11, 12}};
  s.predator = {Cell{8, 12}, Cell{12, 12}};
  env.set_state(s);
  const StepResult r = env.step(std::vector<int>(4, 0));
  EXPECT_EQ(r.team_reward, 0.0);
  EXPECT_TRUE(r.done);
  EXPECT_EQ(env.step_index(), 50);
}

TEST(Prey, ChildIsClampedToParentBox) {
  PreyEnv env;
  env.reset(1);
  PreyState s = env.state();
  s.prey = {Cell{10, 10}, Cell{10, 10}, Cell{15, 10}, Cell{10, 10}};
  s.predator = {Cell{0, 0}, Cell{0, 19}};
  env.set_state(s);
  // Action 3 is E: the sink tries x = 16, six cells from its parent.
  env.step(std::vector<int>{0, 0, 3, 0});
  EXPECT_EQ(env.state().prey[2], (Cell{15, 10}));
}

TEST(Prey, ChildFollowsMovingParent) {
  PreyEnv env;
  env.reset(1);
  PreyState s = env.state();
  s.prey = {Cell{10, 10}, Cell{15, 10}, Cell{15, 10}, Cell{15, 10}};
  s.predator = {Cell{0, 0}, Cell{0, 19}};
  env.set_state(s);
  // The mid prey is dragged back by the root moving W.
  env.step(std::vector<int>{7, 0, 0, 0});
  EXPECT_EQ(env.state().prey[1], (Cell{14, 10}));
  EXPECT_TRUE(env.invariant_violations().empty());
}

TEST(Prey, RewardCountsLivingSinks) {
  PreyEnv env;
  env.reset(3);
  Rng rng(1);
  while (!env.done()) {
    const double r = env.step(random_actions(env, rng)).team_reward;
    ASSERT_GE(r, 0.0);
    ASSERT_LE(r, 2.0);
    ASSERT_EQ(r, env.living_sinks());
  }
}

// Micro

MicroDagSpec two_node_spec() {
  MicroDagSpec spec;
  spec.dag = {2, {{0, 1}}, {}};
  spec.state_counts = {2, 1};
  spec.action_counts = {2, 2};
  spec.initial = {{0.5, 0.5}, {1.0}};
  // Node 0's context: (s0, a0); node 1's: (s0, a0, s1, a1).
  spec.transition = {std::vector<std::vector<double>>(4, {0.25, 0.75}),
                     std::vector<std::vector<double>>(8, {1.0})};
  spec.reward = {{}, std::vector<double>(8, 0.5)};
  spec.horizon = 4;
  return spec;
}

TEST(MicroEnv, ContextIndexing) {
  const MicroDagEnv env(two_node_spec());
  EXPECT_EQ(env.context_count(0), 4);
  EXPECT_EQ(env.context_count(1), 8);
  EXPECT_EQ(env.joint_state_count(), 2);
  EXPECT_EQ(env.joint_action_count(), 4);
  std::set<int> seen;
  for (int s0 = 0; s0 < 2; ++s0)
    for (int a0 = 0; a0 < 2; ++a0)
      for (int a1 = 0; a1 < 2; ++a1) {
        const std::vector<int> states{s0, 0}, actions{a0, a1};
        seen.insert(env.context_index(1, states, actions));
      }
  EXPECT_EQ(seen.size(), 8u);
}

TEST(MicroEnv, RejectsBadTables) {
  MicroDagSpec spec = two_node_spec();
  spec.transition[0][1] = {0.5, 0.6};
  EXPECT_DAGMARL_ERROR(MicroDagEnv{spec}, ErrorCode::kInvalidDistribution);
  spec = two_node_spec();
  spec.initial[0] = {-0.5, 1.5};
  EXPECT_DAGMARL_ERROR(MicroDagEnv{spec}, ErrorCode::kInvalidDistribution);
  spec = two_node_spec();
  spec.transition[1].pop_back();
  EXPECT_DAGMARL_ERROR(MicroDagEnv{spec}, ErrorCode::kConfigError);
  spec = two_node_spec();
  spec.action_counts = {3, 2};
  EXPECT_DAGMARL_ERROR(MicroDagEnv{spec}, ErrorCode::kConfigError);
}

TEST(MicroEnv, TailBound) {
  const MicroDagEnv env(two_node_spec());
  EXPECT_DOUBLE_EQ(env.max_team_reward(), 0.5);
  EXPECT_NEAR(env.tail_bound(0.9), std::pow(0.9, 4) * 0.5 / 0.1, 1e-15);
  EXPECT_FALSE(env.has_negative_reward());
}

TEST(MicroEnv, RandomModelsAreValid) {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const MicroDagEnv env = random_micro_env(rng, {3, 3, 2, 5});
    EXPECT_LE(env.node_count(), 3);
    EXPECT_FALSE(env.has_negative_reward());
    for (NodeId i = 0; i < env.node_count(); ++i) {
      EXPECT_LE(env.state_count(i), 3);
      EXPECT_LE(env.action_count(i), 2);
    }
  }
}

TEST(MicroEnv, DefaultModelPaysWhenBothAct) {
  const std::unique_ptr<Environment> env = make_environment("micro", {{"horizon", "3"}});
  env->reset(0);
  EXPECT_EQ(env->step(std::vector<int>{1, 0}).team_reward, 0.0);
  EXPECT_EQ(env->step(std::vector<int>{0, 1}).team_reward, 0.0);
  EXPECT_EQ(env->step(std::vector<int>{1, 1}).team_reward, 1.0);
  EXPECT_TRUE(env->done());
}

}  // namespace
}  // namespace dagmarl
