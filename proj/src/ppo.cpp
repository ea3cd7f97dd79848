#include "dagmarl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dagmarl/error.hpp"

namespace dagmarl {

void PpoConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::kConfigError, what);
  };
  require(gamma > 0.0 && gamma < 1.0, "ppo: gamma must lie in (0, 1)");
  require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "ppo: gae_lambda must lie in [0, 1]");
  require(clip_epsilon > 0.0, "ppo: clip_epsilon must be positive");
  require(learning_rate >= 0.0, "ppo: learning_rate must be non-negative");
  require(entropy_coef >= 0.0, "ppo: entropy_coef must be non-negative");
  require(value_coef >= 0.0, "ppo: value_coef must be non-negative");
  require(batch_size >= 1, "ppo: batch_size must be >= 1");
  require(epochs_per_update >= 1, "ppo: epochs_per_update must be >= 1");
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      const std::vector<bool>& terminals, double bootstrap_value,
                      double gamma, double lambda) {
  const size_t n = rewards.size();
  if (n == 0) fail(ErrorCode::kEmptyBatch, "compute_gae: empty batch");
  if (values.size() != n || terminals.size() != n) {
    fail(ErrorCode::kDimensionMismatch, "compute_gae: rewards, values and terminals differ in length");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_advantage = 0.0;
  double next_value = bootstrap_value;
  for (size_t k = n; k-- > 0;) {
    const double live = terminals[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + gamma * next_value * live - values[k];
    next_advantage = delta + gamma * lambda * live * next_advantage;
    out.advantages[k] = next_advantage;
    out.returns[k] = next_advantage + values[k];
    next_value = values[k];
  }
  return out;
}

GaeResult compute_gae(const TrajectoryBatch& batch, double gamma, double lambda) {
  std::vector<double> rewards, values;
  std::vector<bool> terminals;
  for (const Transition& t : batch.transitions) {
    rewards.push_back(t.reward);
    values.push_back(t.value);
    terminals.push_back(t.terminal);
  }
  return compute_gae(rewards, values, terminals, batch.bootstrap_value, gamma, lambda);
}

namespace {

void normalize_in_place(std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  if (sd < 1e-8) return;
  for (double& x : xs) x = (x - mean) / sd;
}

}  // namespace

UpdateDiagnostics ppo_update(DenseNet& policy, DenseNet& value, const PolicyHead& head,
                             PpoOptimizers& optimizers, const TrajectoryBatch& batch,
                             const PpoConfig& config, Rng& rng) {
  config.validate();
  const auto& trs = batch.transitions;
  if (trs.empty()) fail(ErrorCode::kEmptyBatch, "ppo_update: empty batch");
  if (policy.output_dim() != head.parameter_count() || value.output_dim() != 1) {
    fail(ErrorCode::kDimensionMismatch, "ppo_update: net outputs do not match head/critic");
  }
  GaeResult gae = compute_gae(batch, config.gamma, config.gae_lambda);
  std::vector<double> adv = gae.advantages;
  normalize_in_place(adv);

  const DenseNet policy_backup = policy;
  const DenseNet value_backup = value;
  const PpoOptimizers opt_backup = optimizers;
  auto rollback = [&](const std::string& why) {
    policy = policy_backup;
    value = value_backup;
    optimizers = opt_backup;
    fail(ErrorCode::kNonFiniteLoss, "ppo_update aborted: " + why);
  };

  optimizers.policy.config.learning_rate = config.learning_rate;
  optimizers.value.config.learning_rate = config.learning_rate;

  const int n = static_cast<int>(trs.size());
  const int in_dim = policy.input_dim();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  UpdateDiagnostics diag;
  double clipped = 0.0;
  double seen = 0.0;
  std::vector<double> pgrad(policy.parameter_count());
  std::vector<double> vgrad(value.parameter_count());

  for (int epoch = 0; epoch < config.epochs_per_update; ++epoch) {
    for (int k = n - 1; k > 0; --k) {
      std::swap(order[k], order[uniform_index(rng, static_cast<uint64_t>(k) + 1)]);
    }
    for (int start = 0; start < n; start += config.batch_size) {
      const int b = std::min(config.batch_size, n - start);
      Eigen::MatrixXd inputs(in_dim, b);
      for (int c = 0; c < b; ++c) {
        const auto& s = trs[order[start + c]].state;
        if (static_cast<int>(s.size()) != in_dim) {
          fail(ErrorCode::kDimensionMismatch, "ppo_update: state length differs from net input");
        }
        inputs.col(c) = Eigen::Map<const Eigen::VectorXd>(s.data(), in_dim);
      }

      DenseNet::Tape ptape;
      const Eigen::MatrixXd head_params = policy.forward_batch(inputs, &ptape);
      Eigen::MatrixXd head_grad = Eigen::MatrixXd::Zero(head_params.rows(), b);
      double policy_loss = 0.0;
      double entropy = 0.0;
      for (int c = 0; c < b; ++c) {
        const int idx = order[start + c];
        const Transition& t = trs[idx];
        std::span<const double> params(head_params.col(c).data(), head_params.rows());
        // Probe pass for the ratio; the gradient pass below needs its value.
        const LogProbEntropy probe = evaluate_action(head, params, t.action);
        const double ratio = std::exp(probe.log_prob - t.log_prob);
        const double a = adv[idx];
        const double unclipped = ratio * a;
        const double clipped_ratio =
            std::clamp(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon);
        policy_loss -= std::min(unclipped, clipped_ratio * a);
        entropy += probe.entropy;
        const bool clip_active = (a >= 0.0 && ratio > 1.0 + config.clip_epsilon) ||
                                 (a < 0.0 && ratio < 1.0 - config.clip_epsilon);
        if (std::abs(ratio - 1.0) > config.clip_epsilon) clipped += 1.0;
        seen += 1.0;
        const double logp_coef = clip_active ? 0.0 : -a * ratio / b;
        std::span<double> g(head_grad.col(c).data(), head_grad.rows());
        evaluate_action(head, params, t.action, logp_coef, -config.entropy_coef / b, g);
      }
      policy_loss /= b;
      entropy /= b;
      const double total_policy_loss = policy_loss - config.entropy_coef * entropy;

      DenseNet::Tape vtape;
      const Eigen::MatrixXd v = value.forward_batch(inputs, &vtape);
      Eigen::MatrixXd vout_grad(1, b);
      double value_loss = 0.0;
      for (int c = 0; c < b; ++c) {
        const double err = v(0, c) - gae.returns[order[start + c]];
        value_loss += err * err;
        vout_grad(0, c) = 2.0 * config.value_coef * err / b;
      }
      value_loss /= b;

      if (!std::isfinite(total_policy_loss) || !std::isfinite(value_loss)) {
        rollback("non-finite loss");
      }
      std::fill(pgrad.begin(), pgrad.end(), 0.0);
      std::fill(vgrad.begin(), vgrad.end(), 0.0);
      policy.backward_batch(ptape, head_grad, pgrad);
      value.backward_batch(vtape, vout_grad, vgrad);
      try {
        adam_step(optimizers.policy, policy.parameters(), pgrad);
        adam_step(optimizers.value, value.parameters(), vgrad);
      } catch (const Error& e) {
        rollback(e.what());
      }
      diag.policy_loss += policy_loss;
      diag.value_loss += value_loss;
      diag.entropy += entropy;
      ++diag.minibatches;
    }
  }
  diag.policy_loss /= diag.minibatches;
  diag.value_loss /= diag.minibatches;
  diag.entropy /= diag.minibatches;
  diag.clip_fraction = seen > 0 ? clipped / seen : 0.0;
  return diag;
}

ActResult act(const DenseNet& policy, const DenseNet& value, const PolicyHead& head,
              std::span<const double> state, Rng& rng) {
  const std::vector<double> params = policy.forward(state);
  PolicySample s = sample_and_logprob(head, params, rng);
  ActResult out;
  out.action = std::move(s.action);
  out.log_prob = s.log_prob;
  out.value = value.forward(state)[0];
  return out;
}

PpoLearner::PpoLearner(std::string role, int input_dim, PolicyHead head,
                       const std::vector<int>& hidden, PpoConfig config, uint64_t seed)
    : role_(std::move(role)), head_(std::move(head)), config_(config), rng_(seed) {
  config_.validate();
  std::vector<int> pdims{input_dim};
  pdims.insert(pdims.end(), hidden.begin(), hidden.end());
  std::vector<int> vdims = pdims;
  pdims.push_back(head_.parameter_count());
  vdims.push_back(1);
  Rng init(splitmix64(seed ^ 0x696e6974ULL));
  policy_ = DenseNet::glorot(pdims, init);
  value_ = DenseNet::glorot(vdims, init);
  AdamConfig adam;
  adam.learning_rate = config_.learning_rate;
  optimizers_.policy = AdamState(policy_.parameter_count(), adam);
  optimizers_.value = AdamState(value_.parameter_count(), adam);
}

ActResult PpoLearner::act(std::span<const double> state) {
  return dagmarl::act(policy_, value_, head_, state, rng_);
}

Action PpoLearner::act_greedy(std::span<const double> state) const {
  return mode_action(head_, policy_.forward(state));
}

double PpoLearner::value(std::span<const double> state) const {
  return value_.forward(state)[0];
}

UpdateDiagnostics PpoLearner::update(double bootstrap_value) {
  if (buffer_.empty()) return {};
  TrajectoryBatch batch{std::move(buffer_), bootstrap_value};
  buffer_.clear();
  return ppo_update(policy_, value_, head_, optimizers_, batch, config_, rng_);
}

void PpoLearner::save(const std::string& dir) const {
  save_checkpoint(dir + "/" + role_ + ".policy.bin", policy_);
  save_checkpoint(dir + "/" + role_ + ".value.bin", value_);
}

void PpoLearner::load(const std::string& dir) {
  DenseNet p = load_checkpoint(dir + "/" + role_ + ".policy.bin");
  DenseNet v = load_checkpoint(dir + "/" + role_ + ".value.bin");
  if (p.layer_dims() != policy_.layer_dims() || v.layer_dims() != value_.layer_dims()) {
    fail(ErrorCode::kCheckpointMismatch, "checkpoint shape does not match agent '" + role_ + "'");
  }
  policy_ = std::move(p);
  value_ = std::move(v);
}

}  // namespace dagmarl
