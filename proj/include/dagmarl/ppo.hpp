#ifndef DAGMARL_PPO_HPP_
#define DAGMARL_PPO_HPP_

#include <span>
#include <string>
#include <vector>

#include "dagmarl/nn.hpp"
#include "dagmarl/rng.hpp"

namespace dagmarl {

struct PpoConfig {
  double clip_epsilon = 0.2;
  double learning_rate = 1e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double entropy_coef = 0.01;
  int batch_size = 256;
  int epochs_per_update = 4;
  double value_coef = 0.5;

  // Throws kConfigError when a field is out of range.
  void validate() const;
};

struct Transition {
  std::vector<double> state;
  Action action;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool terminal = false;
};

// Transitions of one agent in time order. Segments end at terminal flags;
// a non-terminal tail is bootstrapped with `bootstrap_value`.
struct TrajectoryBatch {
  std::vector<Transition> transitions;
  double bootstrap_value = 0.0;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      const std::vector<bool>& terminals, double bootstrap_value,
                      double gamma, double lambda);
GaeResult compute_gae(const TrajectoryBatch& batch, double gamma, double lambda);

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  int minibatches = 0;
};

struct PpoOptimizers {
  AdamState policy;
  AdamState value;
};

// Clipped-surrogate PPO over `batch`: GAE, per-batch advantage
// normalization, `epochs_per_update` shuffled passes in minibatches of
// `batch_size`. On a non-finite loss or gradient all parameters and
// optimizer state are rolled back and kNonFiniteLoss is thrown.
UpdateDiagnostics ppo_update(DenseNet& policy, DenseNet& value, const PolicyHead& head,
                             PpoOptimizers& optimizers, const TrajectoryBatch& batch,
                             const PpoConfig& config, Rng& rng);

struct ActResult {
  Action action;
  double log_prob = 0.0;
  double value = 0.0;
};

ActResult act(const DenseNet& policy, const DenseNet& value, const PolicyHead& head,
              std::span<const double> state, Rng& rng);

// One agent: actor, critic, their optimizers, its own RNG stream and a
// rollout buffer that is consumed by update().
class PpoLearner {
 public:
  PpoLearner(std::string role, int input_dim, PolicyHead head,
             const std::vector<int>& hidden, PpoConfig config, uint64_t seed);

  const std::string& role() const { return role_; }
  const PolicyHead& head() const { return head_; }
  int input_dim() const { return policy_.input_dim(); }

  ActResult act(std::span<const double> state);
  Action act_greedy(std::span<const double> state) const;
  double value(std::span<const double> state) const;

  void record(Transition t) { buffer_.push_back(std::move(t)); }
  std::vector<Transition>& buffer() { return buffer_; }
  const std::vector<Transition>& buffer() const { return buffer_; }

  // Trains on the buffer, then clears it. Empty buffer -> no-op.
  UpdateDiagnostics update(double bootstrap_value = 0.0);

  DenseNet& policy() { return policy_; }
  const DenseNet& policy() const { return policy_; }
  DenseNet& value_net() { return value_; }
  const DenseNet& value_net() const { return value_; }

  // <dir>/<role>.policy.bin and <dir>/<role>.value.bin
  void save(const std::string& dir) const;
  void load(const std::string& dir);

 private:
  std::string role_;
  PolicyHead head_;
  PpoConfig config_;
  DenseNet policy_;
  DenseNet value_;
  PpoOptimizers optimizers_;
  Rng rng_;
  std::vector<Transition> buffer_;
};

}  // namespace dagmarl

#endif  // DAGMARL_PPO_HPP_
