#ifndef DAGMARL_EXPERIMENT_HPP_
#define DAGMARL_EXPERIMENT_HPP_

#include <functional>
#include <string>
#include <vector>

#include "dagmarl/config.hpp"
#include "dagmarl/metrics.hpp"
#include "dagmarl/orchestrator.hpp"

namespace dagmarl {

struct TrainOutputs {
  std::string episodes_csv;
  std::string timing_csv;
  std::string checkpoint_dir;
  std::vector<EpisodeLog> logs;
};

// Trains for config.episodes and writes under config.out_dir:
//   config.ini, episodes.csv, timing.csv (wall-clock seconds per episode),
//   checkpoints/<role>.{policy,value}.bin and checkpoints/manifest.json.
TrainOutputs run_training(const ExperimentConfig& config,
                          const std::function<void(const EpisodeLog&)>& on_episode = {});

struct EvaluationOptions {
  int episodes = 1000;
  uint64_t seed = 0;
  bool stochastic = false;
  int bins = 30;
  int threads = 0;  // 0: hardware concurrency, capped by DAGMARL_THREADS
};

struct EvaluationReport {
  std::vector<double> rewards;
  Histogram histogram;
  Summary summary;
};

// Worker count for `jobs` independent tasks.
int worker_threads(int requested, int jobs);

// Frozen-policy episodes on fresh seeds, spread over worker threads that
// each own a clone of `prototype`. Results do not depend on the thread
// count.
EvaluationReport evaluate_policies(const Trainer& trainer, const Environment& prototype,
                                   const EvaluationOptions& options);

// Rebuilds the run in `run_dir` from its config.ini and checkpoints,
// evaluates it and writes eval_rewards.csv, histogram.csv and
// summary.json there. Throws kCheckpointMismatch when the checkpoints do
// not fit the configuration.
EvaluationReport evaluate_run(const std::string& run_dir, EvaluationOptions options);

}  // namespace dagmarl

#endif  // DAGMARL_EXPERIMENT_HPP_
