#ifndef DAGMARL_ORCHESTRATOR_HPP_
#define DAGMARL_ORCHESTRATOR_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dagmarl/environment.hpp"
#include "dagmarl/ppo.hpp"
#include "dagmarl/reward_flow.hpp"

namespace dagmarl {

enum class RunMode { kGs, kSrm, kLfm, kRfm, kProposed, kDiffM, kCapM };

const char* mode_name(RunMode mode);
// Case-insensitive; accepts "diff_m", "diff-m", "diffm" and so on.
// Unknown names -> kConfigError.
RunMode parse_mode(const std::string& name);

struct TrainConfig {
  RunMode mode = RunMode::kProposed;
  uint64_t seed = 1;
  int gsf_step = 3;  // k
  int goal_dim = 4;  // m
  std::vector<int> hidden{256, 256};
  PpoConfig ppo;
  // Switch off parts of PROPOSED; ignored by the other modes.
  bool disable_leader = false;
  bool disable_rgd = false;
  // Leader state S_l1 + previous goals + previous synthetic rewards,
  // instead of S_l1 alone.
  bool full_leader_state = false;

  void validate() const;
};

// Number of global states in a goal period's GSF: floor((D - 1) / k) + 2.
int gsf_count(int goal_period_length, int k);
// 1-based steps inside the period whose pre-action state is sampled.
std::vector<int> gsf_sample_steps(int goal_period_length, int k);

// Per-follower reward streams of one goal period: every step pays
// team / |V|; sr[i] is added on the period's last step.
std::vector<std::vector<double>> compose_follower_rewards(std::span<const double> team_rewards,
                                                          std::span<const double> sr);

struct DifferenceRewards {
  StepResult step;                 // the true joint action's outcome
  std::vector<double> difference;  // D_i per node
};

// Steps `env` from `before` with the true joint action, then for every
// node whose action differs from `default_action` replays the step from
// `before` with that action replaced. D_i = r(true) - r(replaced). On
// return the env sits in the true-action successor state. An empty
// snapshot -> kSnapshotRequired.
DifferenceRewards difference_rewards(Environment& env, const EnvSnapshot& before,
                                     std::span<const int> actions, int default_action = 0);
double difference_reward(Environment& env, const EnvSnapshot& before,
                         std::span<const int> actions, NodeId agent, int default_action = 0);

// F_t = gamma * phi[t + 1] - phi[t], with phi after the last step = 0.
std::vector<double> cap_shaping(std::span<const double> potentials, double gamma);

struct EpisodeLog {
  int episode = 0;
  double team_reward = 0.0;
  std::vector<double> agent_reward;  // per logged agent
  std::vector<double> agent_sr;      // per logged agent
  int goal_periods = 0;
  double wall_seconds = 0.0;
};

// What happened in one episode, for tests and diagnostics.
struct EpisodeTrace {
  std::vector<std::vector<int>> actions;  // per step, one per node
  std::vector<double> team_rewards;       // per step
  std::vector<std::vector<double>> goals;       // per period, I * m (empty without leader)
  std::vector<std::vector<double>> synthetic;   // per period, one per node (empty without RGD)
  std::vector<int> gsf_sizes;                   // per period
  int leader_actions = 0;
  int rgd_actions = 0;
  int counterfactual_checks = 0;
  int counterfactual_mismatches = 0;
  int skipped_updates = 0;  // PPO updates abandoned on a non-finite loss
};

struct EvalEpisode {
  double team_reward = 0.0;
  int steps = 0;
};

class Trainer {
 public:
  Trainer(TrainConfig config, std::unique_ptr<Environment> env);
  ~Trainer();
  Trainer(Trainer&&) noexcept;
  Trainer& operator=(Trainer&&) noexcept;

  const TrainConfig& config() const { return config_; }
  const Environment& environment() const { return *env_; }
  bool uses_leader() const { return use_leader_; }
  bool uses_rgd() const { return use_rgd_; }

  // Column names of EpisodeLog::agent_reward / agent_sr.
  std::vector<std::string> agent_names() const;

  // Runs and learns from one episode.
  EpisodeLog run_episode();
  const EpisodeTrace& last_trace() const { return trace_; }
  const RewardBaseline& baseline() const { return baseline_; }
  int episodes_done() const { return episode_; }

  // Frozen-policy rollout on `env_seed`; mean/argmax actions unless
  // `stochastic`, which samples with `sample_seed`. Does not touch the
  // trainer's own environment or learners.
  EvalEpisode evaluate_episode(Environment& env, uint64_t env_seed, bool stochastic = false,
                               uint64_t sample_seed = 0) const;

  // One file pair per agent, named by role.
  void save(const std::string& dir) const;
  void load(const std::string& dir);
  std::vector<std::string> roles() const;

 private:
  struct Agents;

  std::vector<double> follower_input(NodeId i, const Environment& env,
                                     std::span<const double> goals) const;
  std::vector<double> leader_input(const Environment& env, std::span<const double> prev_goals,
                                   std::span<const double> prev_sr) const;

  TrainConfig config_;
  std::unique_ptr<Environment> env_;
  bool use_leader_ = false;
  bool use_rgd_ = false;
  std::unique_ptr<Agents> agents_;
  RewardBaseline baseline_;
  int episode_ = 0;
  EpisodeTrace trace_;
};

}  // namespace dagmarl

#endif  // DAGMARL_ORCHESTRATOR_HPP_
