#ifndef DAGMARL_NN_HPP_
#define DAGMARL_NN_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dagmarl/rng.hpp"

namespace dagmarl {

// Fully connected net: ReLU hidden layers, linear output. All parameters
// live in one flat buffer; layer l stores its (out x in) weight matrix in
// row-major order followed by its bias vector.
class DenseNet {
 public:
  DenseNet() = default;
  // All parameters zero.
  explicit DenseNet(std::vector<int> layer_dims);
  // Uniform init in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static DenseNet glorot(std::vector<int> layer_dims, Rng& rng);

  const std::vector<int>& layer_dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  int layer_count() const { return static_cast<int>(dims_.size()) - 1; }
  size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> weights(int layer);
  std::span<double> bias(int layer);

  std::vector<double> forward(std::span<const double> input) const;

  // Activations kept by forward_batch; activations[0] is the input batch,
  // activations[l] the (post-ReLU) input of layer l. One column per sample.
  struct Tape {
    std::vector<Eigen::MatrixXd> activations;
  };
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs,
                                Tape* tape = nullptr) const;
  // Adds d(sum_b <out_b, output_grad_b>)/d(params) to `grads`.
  void backward_batch(const Tape& tape, const Eigen::MatrixXd& output_grad,
                      std::span<double> grads) const;

  // Gradient of <forward(input), output_gradient> w.r.t. all parameters.
  std::vector<double> backward(std::span<const double> input,
                               std::span<const double> output_gradient) const;

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  size_t weight_offset(int layer) const { return offsets_[layer]; }
  size_t bias_offset(int layer) const {
    return offsets_[layer] + static_cast<size_t>(dims_[layer]) * dims_[layer + 1];
  }

  std::vector<int> dims_;
  std::vector<size_t> offsets_;
  std::vector<double> params_;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamState() = default;
  AdamState(size_t parameter_count, AdamConfig cfg)
      : config(cfg), m(parameter_count, 0.0), v(parameter_count, 0.0) {}

  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  int64_t step = 0;
};

// Bias-corrected Adam descent step on `params` (minimizes). Throws
// kShapeMismatch or kNonFiniteGradient; params are untouched on error.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads);

enum class HeadKind { kCategorical, kBeta };

// kCategorical: one independent softmax factor per entry of `categories`,
// consuming that many logits each. kBeta: `dimension` independent Beta
// coordinates on (0, 1), two raw parameters each (alpha then beta), mapped
// to shapes 1 + softplus(raw).
struct PolicyHead {
  HeadKind kind = HeadKind::kCategorical;
  std::vector<int> categories;
  int dimension = 0;

  static PolicyHead categorical(int n) { return {HeadKind::kCategorical, {n}, 0}; }
  static PolicyHead multi_categorical(std::vector<int> n) {
    return {HeadKind::kCategorical, std::move(n), 0};
  }
  static PolicyHead beta(int dim) { return {HeadKind::kBeta, {}, dim}; }

  int parameter_count() const;
};

struct Action {
  std::vector<int> discrete;
  std::vector<double> continuous;
  friend bool operator==(const Action&, const Action&) = default;
};

struct PolicySample {
  Action action;
  double log_prob = 0.0;
  double entropy = 0.0;
};

PolicySample sample_and_logprob(const PolicyHead& head,
                                std::span<const double> params, Rng& rng);

struct LogProbEntropy {
  double log_prob = 0.0;
  double entropy = 0.0;
};

// log pi(action | params) and the exact entropy. When `grad` is non-empty,
// adds logp_coef * dlogp/dparams + entropy_coef * dH/dparams to it.
LogProbEntropy evaluate_action(const PolicyHead& head,
                               std::span<const double> params,
                               const Action& action, double logp_coef = 0.0,
                               double entropy_coef = 0.0,
                               std::span<double> grad = {});

// Argmax per categorical factor, mean per Beta coordinate.
Action mode_action(const PolicyHead& head, std::span<const double> params);

double softplus(double x);
// Beta(a, b) log density at x in (0, 1).
double beta_log_density(double a, double b, double x);

// Little-endian file: "DAGMARLN", u32 version, u32 dim count, u32 dims...,
// u64 parameter count, f64 parameters.
void save_checkpoint(const std::string& path, const DenseNet& net);
DenseNet load_checkpoint(const std::string& path);

}  // namespace dagmarl

#endif  // DAGMARL_NN_HPP_
