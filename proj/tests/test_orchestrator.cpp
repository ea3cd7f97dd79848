#include <cmath>
#include <numeric>

#include "dagmarl/factory_env.hpp"
#include "dagmarl/micro_env.hpp"
#include "dagmarl/orchestrator.hpp"
#include "test_support.hpp"

namespace dagmarl {
namespace {

TrainConfig small_config(RunMode mode, uint64_t seed = 3) {
  TrainConfig c;
  c.mode = mode;
  c.seed = seed;
  c.hidden = {16};
  c.ppo.batch_size = 32;
  c.ppo.epochs_per_update = 2;
  c.ppo.learning_rate = 1e-3;
  return c;
}

std::unique_ptr<Environment> micro(int horizon = 12, int period = 4) {
  return make_environment("micro", {{"horizon", std::to_string(horizon)},
                                    {"goal_period_length", std::to_string(period)}});
}

std::unique_ptr<Environment> small_factory() {
  return make_environment("factory", {{"goal_periods", "3"}, {"goal_period_length", "10"}});
}

void expect_same_trace(const EpisodeTrace& a, const EpisodeTrace& b) {
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_EQ(a.team_rewards, b.team_rewards);
  EXPECT_EQ(a.goals, b.goals);
  EXPECT_EQ(a.synthetic, b.synthetic);
}

void expect_same_log(const EpisodeLog& a, const EpisodeLog& b) {
  EXPECT_EQ(a.team_reward, b.team_reward);
  EXPECT_EQ(a.agent_reward, b.agent_reward);
  EXPECT_EQ(a.agent_sr, b.agent_sr);
  EXPECT_EQ(a.goal_periods, b.goal_periods);
}

TEST(Gsf, Counts) {
  EXPECT_EQ(gsf_count(10, 3), 5);
  EXPECT_EQ(gsf_sample_steps(10, 3), (std::vector<int>{1, 4, 7, 10}));
  EXPECT_EQ(gsf_count(1, 3), 2);
  EXPECT_EQ(gsf_sample_steps(1, 3), (std::vector<int>{1}));
}

TEST(Gsf, FormulaOverRandomArguments) {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const int d = 1 + static_cast<int>(uniform_index(rng, 200));
    const int k = 1 + static_cast<int>(uniform_index(rng, 20));
    // Count the sampled steps 1, 1 + k, ... up to D, plus the terminal state.
    int sampled = 0;
    for (int step = 1; step <= d; step += k) ++sampled;
    EXPECT_EQ(gsf_count(d, k), sampled + 1);
    EXPECT_EQ(gsf_count(d, k), (d - 1) / k + 2);
  }
  EXPECT_DAGMARL_ERROR(gsf_count(0, 3), ErrorCode::kInvalidArgument);
}

TEST(ComposeFollowerRewards, EqualSplit) {
  const std::vector<double> team{8.0, 8.0};
  const auto out = compose_follower_rewards(team, std::vector<double>(4, 0.0));
  ASSERT_EQ(out.size(), 4u);
  for (const auto& stream : out) EXPECT_EQ(stream, (std::vector<double>{2.0, 2.0}));
}

TEST(ComposeFollowerRewards, SyntheticOnLastStep) {
  const std::vector<double> team(5, 0.0);
  const auto out = compose_follower_rewards(team, std::vector<double>{5.0, 0.0});
  // Credited at d = D, i.e. step index lD + D - 1 = (l + 1)D - 1 of the episode.
  EXPECT_EQ(out[0], (std::vector<double>{0, 0, 0, 0, 5.0}));
  EXPECT_EQ(out[1], std::vector<double>(5, 0.0));
}

TEST(ComposeFollowerRewards, SharedStreamSumsToTeamReward) {
  Rng rng(2);
  std::vector<double> team(40);
  for (double& r : team) r = 10.0 * uniform01(rng) - 5.0;
  const auto out = compose_follower_rewards(team, std::vector<double>(3, 0.0));
  double total = 0.0;
  for (const auto& s : out) total += std::accumulate(s.begin(), s.end(), 0.0);
  EXPECT_NEAR(total, std::accumulate(team.begin(), team.end(), 0.0), 1e-9);
}

TEST(DifferenceReward, DefaultActionGivesZero) {
  FactoryEnv env;
  env.reset(1);
  const EnvSnapshot snap = env.snapshot();
  const std::vector<int> a{1, 0, 0, 0};
  EXPECT_EQ(difference_reward(env, snap, a, 1), 0.0);
}

TEST(DifferenceReward, SoleProducerOfDemandedFinal) {
  FactoryEnv env;
  FactoryState s = env.state();
  s.part_a = s.part_b = s.part_C = 0;
  s.part_B = 1;
  s.values = {4, 2, 3};
  s.demand = {3, 3, 4};
  env.set_state(s);
  const std::vector<int> actions{0, 0, 0, 1};
  // Two independent rollouts from the same state.
  FactoryEnv with = env, without = env;
  const double r_true = with.step(actions).team_reward;
  const double r_idle = without.step(std::vector<int>{0, 0, 0, 0}).team_reward;
  EXPECT_DOUBLE_EQ(r_true - r_idle, 4.0 + 0.8);

  const EnvSnapshot snap = env.snapshot();
  const DifferenceRewards d = difference_rewards(env, snap, actions);
  EXPECT_DOUBLE_EQ(d.difference[3], 4.8);
  EXPECT_EQ(d.difference[0], 0.0);
  EXPECT_EQ(d.step.team_reward, r_true);
  EXPECT_TRUE(env.same_state(with.snapshot()));
}

TEST(DifferenceReward, IndependentRewardGivesZero) {
  const std::unique_ptr<Environment> env =
      make_environment("micro", {{"horizon", "5"}, {"constant_reward", "2"}});
  env->reset(0);
  const DifferenceRewards d = difference_rewards(*env, env->snapshot(), std::vector<int>{1, 1});
  EXPECT_EQ(d.difference, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(d.step.team_reward, 2.0);
}

TEST(DifferenceReward, RestoresTrueSuccessor) {
  for (const char* name : {"factory", "logistics", "prey"}) {
    SCOPED_TRACE(name);
    const std::unique_ptr<Environment> env = make_environment(name, {});
    const std::unique_ptr<Environment> twin = env->clone();
    env->reset(4);
    twin->reset(4);
    Rng rng(5);
    for (int t = 0; t < 50 && !env->done(); ++t) {
      std::vector<int> a;
      for (int n : env->action_counts()) a.push_back(static_cast<int>(uniform_index(rng, n)));
      const DifferenceRewards d = difference_rewards(*env, env->snapshot(), a);
      const StepResult r = twin->step(a);
      ASSERT_EQ(d.step.team_reward, r.team_reward);
      ASSERT_TRUE(env->same_state(twin->snapshot()));
    }
  }
}

TEST(DifferenceReward, RequiresSnapshot) {
  FactoryEnv env;
  EXPECT_DAGMARL_ERROR(difference_rewards(env, EnvSnapshot{}, std::vector<int>{0, 0, 0, 0}),
                       ErrorCode::kSnapshotRequired);
}

TEST(CapShaping, ConstantPotential) {
  const std::vector<double> phi(6, 3.0);
  const std::vector<double> f = cap_shaping(phi, 0.99);
  for (size_t t = 0; t + 1 < f.size(); ++t) EXPECT_NEAR(f[t], -0.03, 1e-15);
  EXPECT_EQ(f.back(), -3.0);
}

TEST(CapShaping, ZeroPotential) {
  for (double x : cap_shaping(std::vector<double>(7, 0.0), 0.9)) EXPECT_EQ(x, 0.0);
}

TEST(CapShaping, DiscountedSumTelescopes) {
  Rng rng(7);
  std::vector<double> phi(30);
  for (double& p : phi) p = 2.0 * uniform01(rng) - 1.0;
  const double gamma = 0.95;
  const std::vector<double> f = cap_shaping(phi, gamma);
  double direct = 0.0, disc = 1.0;
  for (double x : f) {
    direct += disc * x;
    disc *= gamma;
  }
  // sum gamma^t (gamma phi_{t+1} - phi_t) = gamma^T phi_T - phi_0, phi_T = 0.
  EXPECT_NEAR(direct, -phi.front(), 1e-12);
}

TEST(RunModes, ParseAndName) {
  EXPECT_EQ(parse_mode("proposed"), RunMode::kProposed);
  EXPECT_EQ(parse_mode("Diff-M"), RunMode::kDiffM);
  EXPECT_EQ(parse_mode("cap_m"), RunMode::kCapM);
  EXPECT_EQ(parse_mode("GS"), RunMode::kGs);
  EXPECT_STREQ(mode_name(RunMode::kSrm), "SRM");
  EXPECT_DAGMARL_ERROR(parse_mode("qmix"), ErrorCode::kConfigError);
  for (RunMode m : {RunMode::kGs, RunMode::kSrm, RunMode::kLfm, RunMode::kRfm, RunMode::kProposed,
                    RunMode::kDiffM, RunMode::kCapM}) {
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  }
}

TEST(Trainer, ConfigErrors) {
  TrainConfig c = small_config(RunMode::kSrm);
  c.gsf_step = 0;
  EXPECT_DAGMARL_ERROR(Trainer(c, micro()), ErrorCode::kConfigError);
  c = small_config(RunMode::kSrm);
  c.ppo.gamma = 1.5;
  EXPECT_DAGMARL_ERROR(Trainer(c, micro()), ErrorCode::kConfigError);
  EXPECT_DAGMARL_ERROR(Trainer(small_config(RunMode::kSrm), nullptr), ErrorCode::kConfigError);
}

TEST(Trainer, ModeComposition) {
  struct Case {
    RunMode mode;
    bool leader, rgd;
  };
  for (const Case& c : {Case{RunMode::kGs, false, false}, Case{RunMode::kSrm, false, false},
                        Case{RunMode::kLfm, true, false}, Case{RunMode::kRfm, false, true},
                        Case{RunMode::kProposed, true, true}, Case{RunMode::kDiffM, false, false},
                        Case{RunMode::kCapM, false, false}}) {
    Trainer t(small_config(c.mode), micro());
    EXPECT_EQ(t.uses_leader(), c.leader) << mode_name(c.mode);
    EXPECT_EQ(t.uses_rgd(), c.rgd) << mode_name(c.mode);
  }
  EXPECT_EQ(Trainer(small_config(RunMode::kGs), micro()).agent_names(), (std::vector<std::string>{"gs"}));
  EXPECT_EQ(Trainer(small_config(RunMode::kSrm), small_factory()).agent_names(),
            (std::vector<std::string>{"parts", "maker_B", "maker_C", "assembly"}));
}

TEST(Trainer, SrmConstantRewardSplitsEqually) {
  const int horizon = 12;
  const double c = 3.0;
  Trainer t(small_config(RunMode::kSrm),
            make_environment("micro", {{"horizon", std::to_string(horizon)},
                                       {"goal_period_length", "4"},
                                       {"constant_reward", std::to_string(c)}}));
  const EpisodeLog log = t.run_episode();
  EXPECT_DOUBLE_EQ(log.team_reward, c * horizon);
  for (double r : log.agent_reward) EXPECT_DOUBLE_EQ(r, c * horizon / 2.0);
  EXPECT_EQ(log.goal_periods, 3);
}

TEST(Trainer, ProposedEpisodeStructure) {
  Trainer t(small_config(RunMode::kProposed), small_factory());
  for (int e = 0; e < 3; ++e) {
    const EpisodeLog log = t.run_episode();
    const EpisodeTrace& tr = t.last_trace();
    EXPECT_EQ(log.episode, e);
    EXPECT_EQ(log.goal_periods, 3);
    EXPECT_EQ(tr.actions.size(), 30u);
    EXPECT_EQ(tr.leader_actions, 3);
    EXPECT_EQ(tr.rgd_actions, 3);
    ASSERT_EQ(tr.goals.size(), 3u);
    for (const auto& g : tr.goals) {
      EXPECT_EQ(g.size(), 4u * 4u);
      for (double x : g) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
      }
    }
    for (int size : tr.gsf_sizes) EXPECT_EQ(size, gsf_count(10, 3));
    if (e == 0) {
      for (const auto& sr : tr.synthetic)
        for (double x : sr) EXPECT_EQ(x, 0.0);
      for (double x : log.agent_sr) EXPECT_EQ(x, 0.0);
    }
    EXPECT_NEAR(log.team_reward, std::accumulate(tr.team_rewards.begin(), tr.team_rewards.end(), 0.0),
                1e-9);
  }
  EXPECT_EQ(t.episodes_done(), 3);
}

TEST(Trainer, SyntheticRewardsStayWithinBudget) {
  // A positive-reward environment so the baseline and budget are positive.
  Trainer t(small_config(RunMode::kRfm),
            make_environment("micro", {{"horizon", "12"}, {"goal_period_length", "4"},
                                       {"constant_reward", "1"}}));
  t.run_episode();
  const RewardBaseline base = t.baseline();
  EXPECT_EQ(base.mean_total_reward, 12.0);
  EXPECT_EQ(base.mean_goal_periods, 3.0);
  t.run_episode();
  bool any_positive = false;
  for (const auto& sr : t.last_trace().synthetic) {
    const double total = std::accumulate(sr.begin(), sr.end(), 0.0);
    EXPECT_GE(total, 0.0);
    EXPECT_LE(total, base.mean_total_reward / base.mean_goal_periods + 1e-12);
    for (double x : sr) EXPECT_GE(x, 0.0);
    any_positive = any_positive || total > 0.0;
  }
  EXPECT_TRUE(any_positive);
}

TEST(Trainer, SameSeedSameLogs) {
  for (RunMode mode : {RunMode::kGs, RunMode::kProposed, RunMode::kDiffM, RunMode::kCapM}) {
    SCOPED_TRACE(mode_name(mode));
    Trainer a(small_config(mode, 9), small_factory());
    Trainer b(small_config(mode, 9), small_factory());
    for (int e = 0; e < 2; ++e) {
      expect_same_log(a.run_episode(), b.run_episode());
      expect_same_trace(a.last_trace(), b.last_trace());
    }
  }
}

TEST(Trainer, DifferentSeedsDiffer) {
  Trainer a(small_config(RunMode::kSrm, 1), small_factory());
  Trainer b(small_config(RunMode::kSrm, 2), small_factory());
  a.run_episode();
  b.run_episode();
  EXPECT_NE(a.last_trace().actions, b.last_trace().actions);
}

TEST(Trainer, ProposedWithoutRgdIsLfm) {
  TrainConfig p = small_config(RunMode::kProposed, 5);
  p.disable_rgd = true;
  Trainer a(p, small_factory());
  Trainer b(small_config(RunMode::kLfm, 5), small_factory());
  for (int e = 0; e < 3; ++e) {
    expect_same_log(a.run_episode(), b.run_episode());
    expect_same_trace(a.last_trace(), b.last_trace());
  }
}

TEST(Trainer, ProposedWithoutLeaderIsRfm) {
  TrainConfig p = small_config(RunMode::kProposed, 5);
  p.disable_leader = true;
  Trainer a(p, small_factory());
  Trainer b(small_config(RunMode::kRfm, 5), small_factory());
  for (int e = 0; e < 3; ++e) {
    expect_same_log(a.run_episode(), b.run_episode());
    expect_same_trace(a.last_trace(), b.last_trace());
  }
}

TEST(Trainer, DiffModeCounterfactualHygiene) {
  for (RunMode mode : {RunMode::kDiffM, RunMode::kCapM}) {
    Trainer t(small_config(mode), small_factory());
    t.run_episode();
    EXPECT_EQ(t.last_trace().counterfactual_checks, 30);
    EXPECT_EQ(t.last_trace().counterfactual_mismatches, 0);
  }
}

TEST(Trainer, EvaluationIsDeterministicAndIsolated) {
  Trainer t(small_config(RunMode::kProposed), small_factory());
  t.run_episode();
  const std::unique_ptr<Environment> env = small_factory();
  const EvalEpisode a = t.evaluate_episode(*env, 42);
  const EvalEpisode b = t.evaluate_episode(*env, 42);
  EXPECT_EQ(a.team_reward, b.team_reward);
  EXPECT_EQ(a.steps, 30);
  const EvalEpisode c = t.evaluate_episode(*env, 42, true, 7);
  const EvalEpisode d = t.evaluate_episode(*env, 42, true, 7);
  EXPECT_EQ(c.team_reward, d.team_reward);
  EXPECT_EQ(t.episodes_done(), 1);
  const std::unique_ptr<Environment> other = make_environment("factory", {});
  EXPECT_DAGMARL_ERROR(t.evaluate_episode(*other, 1), ErrorCode::kConfigError);
}

TEST(Trainer, CheckpointRoundTrip) {
  testing::TempDir dir("trainer");
  Trainer a(small_config(RunMode::kProposed, 1), small_factory());
  a.run_episode();
  a.save(dir.path().string());
  Trainer b(small_config(RunMode::kProposed, 2), small_factory());
  b.load(dir.path().string());
  const std::unique_ptr<Environment> env = small_factory();
  for (uint64_t s = 0; s < 3; ++s) {
    EXPECT_EQ(a.evaluate_episode(*env, s).team_reward, b.evaluate_episode(*env, s).team_reward);
  }
  // SRM followers see no goal slice, so their input width differs.
  Trainer c(small_config(RunMode::kSrm, 2), small_factory());
  EXPECT_DAGMARL_ERROR(c.load(dir.path().string()), ErrorCode::kCheckpointMismatch);
  TrainConfig wide = small_config(RunMode::kProposed, 2);
  wide.hidden = {8};
  Trainer d(wide, small_factory());
  EXPECT_DAGMARL_ERROR(d.load(dir.path().string()), ErrorCode::kCheckpointMismatch);
}

}  // namespace
}  // namespace dagmarl
