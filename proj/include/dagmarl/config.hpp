#ifndef DAGMARL_CONFIG_HPP_
#define DAGMARL_CONFIG_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dagmarl/environment.hpp"
#include "dagmarl/orchestrator.hpp"

namespace dagmarl {

// Node names plus task arcs as name pairs.
struct DagDescription {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> arcs;
};

struct ExperimentConfig {
  std::string env = "factory";
  EnvOverrides env_overrides;
  TrainConfig train;
  int episodes = 100;
  std::string out_dir = "out";
  int window = 100;
  int bins = 30;
  int eval_episodes = 1000;
  bool eval_stochastic = false;
  std::optional<DagDescription> dag;

  // Throws kConfigError on out-of-range values or unresolvable names.
  void validate() const;
};

// INI-style file:
//   [experiment] mode seed episodes out window bins eval_episodes eval_stochastic
//   [env]        name, then any environment setting
//   [agents]     gsf_step goal_dim hidden disable_leader disable_rgd full_leader_state
//   [ppo]        clip_epsilon learning_rate gamma gae_lambda entropy_coef
//                batch_size epochs_per_update value_coef
//   [dag]        nodes = a, b, c   arcs = a->b, b->c
// Throws kIoError when unreadable, kConfigError on unknown keys or bad
// values.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

// Applies one "section.key = value" setting, as found in the file.
void apply_setting(ExperimentConfig& config, const std::string& dotted_key,
                   const std::string& value);

// Canonical text form; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& config);

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config);

}  // namespace dagmarl

#endif  // DAGMARL_CONFIG_HPP_
