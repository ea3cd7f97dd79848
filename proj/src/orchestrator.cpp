#include "dagmarl/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

namespace dagmarl {

namespace {

std::string canonical(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

void append(std::vector<double>& out, std::span<const double> x) {
  out.insert(out.end(), x.begin(), x.end());
}

}  // namespace

const char* mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kGs: return "GS";
    case RunMode::kSrm: return "SRM";
    case RunMode::kLfm: return "LFM";
    case RunMode::kRfm: return "RFM";
    case RunMode::kProposed: return "PROPOSED";
    case RunMode::kDiffM: return "DIFF_M";
    case RunMode::kCapM: return "CAP_M";
  }
  return "?";
}

RunMode parse_mode(const std::string& name) {
  const std::string c = canonical(name);
  for (RunMode m : {RunMode::kGs, RunMode::kSrm, RunMode::kLfm, RunMode::kRfm, RunMode::kProposed,
                    RunMode::kDiffM, RunMode::kCapM}) {
    if (canonical(mode_name(m)) == c) return m;
  }
  fail(ErrorCode::kConfigError, "unknown mode '" + name +
                                    "' (expected gs, srm, lfm, rfm, proposed, diff_m or cap_m)");
}

void TrainConfig::validate() const {
  ppo.validate();
  if (gsf_step < 1) fail(ErrorCode::kConfigError, "GSF step k must be >= 1");
  if (goal_dim < 1) fail(ErrorCode::kConfigError, "goal dimension must be >= 1");
  for (int h : hidden) {
    if (h < 1) fail(ErrorCode::kConfigError, "hidden layer sizes must be >= 1");
  }
}

int gsf_count(int goal_period_length, int k) {
  if (goal_period_length < 1 || k < 1) {
    fail(ErrorCode::kInvalidArgument, "goal period length and GSF step must be >= 1");
  }
  return (goal_period_length - 1) / k + 2;
}

std::vector<int> gsf_sample_steps(int goal_period_length, int k) {
  const int count = gsf_count(goal_period_length, k) - 1;
  std::vector<int> steps(count);
  for (int j = 0; j < count; ++j) steps[j] = k * j + 1;
  return steps;
}

std::vector<std::vector<double>> compose_follower_rewards(std::span<const double> team_rewards,
                                                          std::span<const double> sr) {
  const size_t n = sr.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "need at least one follower");
  std::vector<std::vector<double>> streams(n, std::vector<double>(team_rewards.size()));
  for (size_t i = 0; i < n; ++i) {
    for (size_t t = 0; t < team_rewards.size(); ++t) {
      streams[i][t] = team_rewards[t] / static_cast<double>(n);
    }
    if (!team_rewards.empty()) streams[i].back() += sr[i];
  }
  return streams;
}

DifferenceRewards difference_rewards(Environment& env, const EnvSnapshot& before,
                                     std::span<const int> actions, int default_action) {
  if (before.kind.empty() || !before.state.has_value()) {
    fail(ErrorCode::kSnapshotRequired, "difference rewards need a pre-step snapshot");
  }
  DifferenceRewards out;
  env.restore(before);
  out.step = env.step(actions);
  const EnvSnapshot after = env.snapshot();
  out.difference.assign(actions.size(), 0.0);
  std::vector<int> replaced(actions.begin(), actions.end());
  for (size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == default_action) continue;
    replaced[i] = default_action;
    env.restore(before);
    out.difference[i] = out.step.team_reward - env.step(replaced).team_reward;
    replaced[i] = actions[i];
  }
  env.restore(after);
  return out;
}

double difference_reward(Environment& env, const EnvSnapshot& before,
                         std::span<const int> actions, NodeId agent, int default_action) {
  if (agent < 0 || agent >= static_cast<int>(actions.size())) {
    fail(ErrorCode::kInvalidNode, "no agent " + std::to_string(agent));
  }
  return difference_rewards(env, before, actions, default_action).difference[agent];
}

std::vector<double> cap_shaping(std::span<const double> potentials, double gamma) {
  std::vector<double> f(potentials.size());
  for (size_t t = 0; t < potentials.size(); ++t) {
    const double next = t + 1 < potentials.size() ? potentials[t + 1] : 0.0;
    f[t] = gamma * next - potentials[t];
  }
  return f;
}

struct Trainer::Agents {
  std::vector<PpoLearner> followers;
  std::optional<PpoLearner> gs;
  std::optional<PpoLearner> leader;
  std::optional<PpoLearner> generator;
  std::optional<PpoLearner> distributor;

  std::vector<PpoLearner*> all() {
    std::vector<PpoLearner*> out;
    for (auto& f : followers) out.push_back(&f);
    for (auto* o : {&gs, &leader, &generator, &distributor}) {
      if (*o) out.push_back(&**o);
    }
    return out;
  }
};

Trainer::Trainer(TrainConfig config, std::unique_ptr<Environment> env)
    : config_(std::move(config)), env_(std::move(env)), agents_(std::make_unique<Agents>()) {
  config_.validate();
  if (!env_) fail(ErrorCode::kConfigError, "trainer needs an environment");
  const RunMode mode = config_.mode;
  use_leader_ = mode == RunMode::kLfm || (mode == RunMode::kProposed && !config_.disable_leader);
  use_rgd_ = mode == RunMode::kRfm || (mode == RunMode::kProposed && !config_.disable_rgd);

  const int n = env_->node_count();
  const int m = config_.goal_dim;
  const uint64_t seed = config_.seed;
  const std::vector<int> dims = env_->observation_dims();
  const std::vector<int> counts = env_->action_counts();
  auto learner = [&](const std::string& role, int input, PolicyHead head) {
    return PpoLearner(role, input, std::move(head), config_.hidden, config_.ppo,
                      derive_seed(seed, role));
  };
  if (mode == RunMode::kGs) {
    agents_->gs.emplace(learner("gs", env_->global_state_dim(), PolicyHead::multi_categorical(counts)));
    return;
  }
  for (NodeId i = 0; i < n; ++i) {
    agents_->followers.push_back(learner("follower-" + std::to_string(i),
                                         dims[i] + (use_leader_ ? m : 0),
                                         PolicyHead::categorical(counts[i])));
  }
  if (use_leader_) {
    const int input = env_->global_state_dim() + (config_.full_leader_state ? n * m + n : 0);
    agents_->leader.emplace(learner("leader", input, PolicyHead::beta(n * m)));
  }
  if (use_rgd_) {
    const int input = gsf_count(env_->goal_period_length(), config_.gsf_step) *
                          env_->global_state_dim() +
                      (use_leader_ ? n * m : 0);
    agents_->generator.emplace(learner("rgd-generator", input, PolicyHead::beta(1)));
    agents_->distributor.emplace(
        learner("rgd-distributor", input, PolicyHead::beta(n + env_->topology().arc_count())));
  }
}

Trainer::~Trainer() = default;
Trainer::Trainer(Trainer&&) noexcept = default;
Trainer& Trainer::operator=(Trainer&&) noexcept = default;

std::vector<std::string> Trainer::agent_names() const {
  if (config_.mode == RunMode::kGs) return {"gs"};
  std::vector<std::string> names;
  for (NodeId i = 0; i < env_->node_count(); ++i) names.push_back(env_->topology().name(i));
  return names;
}

std::vector<std::string> Trainer::roles() const {
  std::vector<std::string> out;
  for (PpoLearner* l : agents_->all()) out.push_back(l->role());
  return out;
}

std::vector<double> Trainer::follower_input(NodeId i, const Environment& env,
                                            std::span<const double> goals) const {
  std::vector<double> x = env.observe(i);
  if (use_leader_) {
    const size_t m = config_.goal_dim;
    append(x, goals.subspan(i * m, m));
  }
  return x;
}

std::vector<double> Trainer::leader_input(const Environment& env,
                                          std::span<const double> prev_goals,
                                          std::span<const double> prev_sr) const {
  std::vector<double> x = env.global_state();
  if (config_.full_leader_state) {
    append(x, prev_goals);
    append(x, prev_sr);
  }
  return x;
}

EpisodeLog Trainer::run_episode() {
  const auto start = std::chrono::steady_clock::now();
  Environment& env = *env_;
  Agents& ag = *agents_;
  const RunMode mode = config_.mode;
  const int n = env.node_count();
  const int m = config_.goal_dim;
  const int period_length = env.goal_period_length();
  const std::vector<int> sample_steps = gsf_sample_steps(period_length, config_.gsf_step);
  const int gsf_size = gsf_count(period_length, config_.gsf_step);
  const bool counterfactual = mode == RunMode::kDiffM || mode == RunMode::kCapM;

  trace_ = EpisodeTrace{};
  env.reset(derive_seed(config_.seed, "env", static_cast<uint64_t>(episode_)));

  EpisodeLog log;
  log.episode = episode_;
  const size_t logged = mode == RunMode::kGs ? 1 : static_cast<size_t>(n);
  log.agent_reward.assign(logged, 0.0);
  log.agent_sr.assign(logged, 0.0);

  std::vector<double> goals;
  std::vector<double> prev_goals(static_cast<size_t>(n) * m, 0.0);
  std::vector<double> prev_sr(n, 0.0);
  std::vector<std::vector<double>> potentials(n);
  bool rgd_pending = false;
  int periods = 0;

  while (!env.done()) {
    if (use_leader_) {
      std::vector<double> state = leader_input(env, prev_goals, prev_sr);
      ActResult a = ag.leader->act(state);
      goals = a.action.continuous;
      ag.leader->record({std::move(state), std::move(a.action), a.log_prob, 0.0, a.value, false});
      ++trace_.leader_actions;
      trace_.goals.push_back(goals);
    }

    std::vector<double> gsf;
    int gsf_samples = 0;
    std::vector<double> period_team;
    std::vector<std::vector<double>> period_difference(n);
    std::vector<size_t> period_start(ag.followers.size());
    for (size_t i = 0; i < ag.followers.size(); ++i) period_start[i] = ag.followers[i].buffer().size();

    for (int d = 1; d <= period_length && !env.done(); ++d) {
      if (use_rgd_ && std::binary_search(sample_steps.begin(), sample_steps.end(), d)) {
        append(gsf, env.global_state());
        ++gsf_samples;
      }
      std::vector<int> actions(n);
      if (mode == RunMode::kGs) {
        std::vector<double> state = env.global_state();
        ActResult a = ag.gs->act(state);
        actions = a.action.discrete;
        ag.gs->record({std::move(state), std::move(a.action), a.log_prob, 0.0, a.value, false});
      } else {
        for (NodeId i = 0; i < n; ++i) {
          std::vector<double> x = follower_input(i, env, goals);
          ActResult a = ag.followers[i].act(x);
          actions[i] = a.action.discrete[0];
          ag.followers[i].record({std::move(x), std::move(a.action), a.log_prob, 0.0, a.value, false});
        }
      }

      StepResult result;
      if (counterfactual) {
        // Independent reference successor for the restore-discipline check.
        std::unique_ptr<Environment> reference = env.clone();
        reference->step(actions);
        const DifferenceRewards dr = difference_rewards(env, env.snapshot(), actions);
        result = dr.step;
        ++trace_.counterfactual_checks;
        if (!env.same_state(reference->snapshot())) ++trace_.counterfactual_mismatches;
        for (NodeId i = 0; i < n; ++i) period_difference[i].push_back(dr.difference[i]);
      } else {
        result = env.step(actions);
      }
      const double r = result.team_reward;
      if (mode == RunMode::kGs) {
        ag.gs->buffer().back().reward = r;
        log.agent_reward[0] += r;
      }
      period_team.push_back(r);
      trace_.actions.push_back(std::move(actions));
      trace_.team_rewards.push_back(r);
      log.team_reward += r;
    }
    ++periods;

    const double period_total = [&] {
      double s = 0.0;
      for (double r : period_team) s += r;
      return s;
    }();
    if (use_leader_) ag.leader->buffer().back().reward = period_total;
    if (rgd_pending) {
      ag.generator->buffer().back().reward = period_total;
      ag.distributor->buffer().back().reward = period_total;
    }

    std::vector<double> sr(n, 0.0);
    if (use_rgd_) {
      // A period cut short by the episode end pads its GSF with the
      // terminal state.
      const std::vector<double> terminal = env.global_state();
      for (; gsf_samples < gsf_size; ++gsf_samples) append(gsf, terminal);
      trace_.gsf_sizes.push_back(gsf_samples);
      std::vector<double> state = std::move(gsf);
      append(state, goals);
      ActResult g = ag.generator->act(state);
      ActResult dist = ag.distributor->act(state);
      RgdOutput out;
      out.q = g.action.continuous[0];
      out.node_values.assign(dist.action.continuous.begin(), dist.action.continuous.begin() + n);
      out.arc_values.assign(dist.action.continuous.begin() + n, dist.action.continuous.end());
      sr = distribute(env.topology(), out, synthetic_budget(out.q, baseline_));
      ag.generator->record({state, std::move(g.action), g.log_prob, 0.0, g.value, false});
      ag.distributor->record({std::move(state), std::move(dist.action), dist.log_prob, 0.0,
                              dist.value, false});
      rgd_pending = true;
      ++trace_.rgd_actions;
      trace_.synthetic.push_back(sr);
    }

    if (mode != RunMode::kGs) {
      const auto streams = compose_follower_rewards(period_team, sr);
      for (NodeId i = 0; i < n; ++i) {
        auto& buffer = ag.followers[i].buffer();
        for (size_t t = 0; t < period_team.size(); ++t) {
          const double reward = mode == RunMode::kDiffM ? period_difference[i][t] : streams[i][t];
          buffer[period_start[i] + t].reward = reward;
          log.agent_reward[i] += reward;
        }
        log.agent_sr[i] += sr[i];
        if (mode == RunMode::kCapM) {
          append(potentials[i], period_difference[i]);
        }
      }
    }
    prev_goals = use_leader_ ? goals : prev_goals;
    prev_sr = sr;
  }

  if (mode == RunMode::kCapM) {
    for (NodeId i = 0; i < n; ++i) {
      const std::vector<double> shaping = cap_shaping(potentials[i], config_.ppo.gamma);
      auto& buffer = ag.followers[i].buffer();
      for (size_t t = 0; t < shaping.size(); ++t) {
        buffer[t].reward += shaping[t];
        log.agent_reward[i] += shaping[t];
      }
    }
  }

  log.goal_periods = periods;
  baseline_ = update_baseline(baseline_, log.team_reward, std::max(1, periods));

  // Episode end is terminal for every agent; the last RGD action keeps
  // reward 0.
  for (PpoLearner* l : ag.all()) {
    if (!l->buffer().empty()) l->buffer().back().terminal = true;
  }
  for (PpoLearner* l : ag.all()) {
    try {
      l->update();
    } catch (const Error& e) {
      // The learner has rolled itself back; skip this agent's update.
      if (e.code() != ErrorCode::kNonFiniteLoss) throw;
      ++trace_.skipped_updates;
    }
  }

  ++episode_;
  log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return log;
}

EvalEpisode Trainer::evaluate_episode(Environment& env, uint64_t env_seed, bool stochastic,
                                      uint64_t sample_seed) const {
  if (env.fingerprint() != env_->fingerprint()) {
    fail(ErrorCode::kConfigError, "evaluation environment differs from the training environment");
  }
  const Agents& ag = *agents_;
  Rng rng(sample_seed);
  auto choose = [&](const PpoLearner& l, std::span<const double> x) {
    if (!stochastic) return l.act_greedy(x);
    return act(l.policy(), l.value_net(), l.head(), x, rng).action;
  };
  const int n = env.node_count();
  env.reset(env_seed);
  EvalEpisode out;
  std::vector<double> goals;
  const std::vector<double> zeros_goals(static_cast<size_t>(n) * config_.goal_dim, 0.0);
  std::vector<double> prev_goals = zeros_goals;
  const std::vector<double> prev_sr(n, 0.0);
  while (!env.done()) {
    if (use_leader_) {
      goals = choose(*ag.leader, leader_input(env, prev_goals, prev_sr)).continuous;
      prev_goals = goals;
    }
    for (int d = 0; d < env.goal_period_length() && !env.done(); ++d) {
      std::vector<int> actions(n);
      if (config_.mode == RunMode::kGs) {
        actions = choose(*ag.gs, env.global_state()).discrete;
      } else {
        for (NodeId i = 0; i < n; ++i) {
          actions[i] = choose(ag.followers[i], follower_input(i, env, goals)).discrete[0];
        }
      }
      out.team_reward += env.step(actions).team_reward;
      ++out.steps;
    }
  }
  return out;
}

void Trainer::save(const std::string& dir) const {
  for (PpoLearner* l : agents_->all()) l->save(dir);
}

void Trainer::load(const std::string& dir) {
  for (PpoLearner* l : agents_->all()) l->load(dir);
}

}  // namespace dagmarl
