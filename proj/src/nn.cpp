#include "dagmarl/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "dagmarl/error.hpp"

namespace dagmarl {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMajor>;
using MutWeights = Eigen::Map<RowMajor>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using MutVec = Eigen::Map<Eigen::VectorXd>;

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double digamma(double x) { return boost::math::digamma(x); }
double trigamma(double x) { return boost::math::trigamma(x); }

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_entropy(double a, double b) {
  return log_beta_fn(a, b) - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b) +
         (a + b - 2.0) * digamma(a + b);
}

// Softmax factor: log-sum-exp of `logits`, probabilities written to `p`.
double log_softmax(std::span<const double> logits, std::vector<double>& p) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  p.resize(logits.size());
  double sum = 0.0;
  for (size_t j = 0; j < logits.size(); ++j) {
    p[j] = std::exp(logits[j] - mx);
    sum += p[j];
  }
  for (double& x : p) x /= sum;
  return mx + std::log(sum);
}

void check_head_params(const PolicyHead& head, std::span<const double> params) {
  if (static_cast<int>(params.size()) != head.parameter_count()) {
    fail(ErrorCode::kDimensionMismatch,
         "policy head expects " + std::to_string(head.parameter_count()) +
             " parameters, got " + std::to_string(params.size()));
  }
  if (!all_finite(params)) fail(ErrorCode::kNonFiniteParams, "non-finite policy parameters");
}

constexpr char kMagic[8] = {'D', 'A', 'G', 'M', 'A', 'R', 'L', 'N'};
constexpr uint32_t kCheckpointVersion = 1;

template <typename T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  value = to_little_endian(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) fail(ErrorCode::kCheckpointMismatch, "truncated checkpoint");
  return to_little_endian(value);
}

}  // namespace

DenseNet::DenseNet(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2) fail(ErrorCode::kInvalidArgument, "a net needs at least input and output dims");
  for (int d : dims_) {
    if (d <= 0) fail(ErrorCode::kInvalidArgument, "layer dims must be positive");
  }
  size_t total = 0;
  for (int l = 0; l < layer_count(); ++l) {
    offsets_.push_back(total);
    total += static_cast<size_t>(dims_[l] + 1) * dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

DenseNet DenseNet::glorot(std::vector<int> layer_dims, Rng& rng) {
  DenseNet net(std::move(layer_dims));
  for (int l = 0; l < net.layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / (net.dims_[l] + net.dims_[l + 1]));
    for (double& w : net.weights(l)) w = (2.0 * uniform01(rng) - 1.0) * limit;
  }
  return net;
}

std::span<double> DenseNet::weights(int layer) {
  return {params_.data() + weight_offset(layer),
          static_cast<size_t>(dims_[layer]) * dims_[layer + 1]};
}

std::span<double> DenseNet::bias(int layer) {
  return {params_.data() + bias_offset(layer), static_cast<size_t>(dims_[layer + 1])};
}

std::vector<double> DenseNet::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "net input expects " + std::to_string(input_dim()) +
                                            " values, got " + std::to_string(input.size()));
  }
  if (!all_finite(input)) fail(ErrorCode::kNonFiniteInput, "non-finite net input");
  Eigen::VectorXd a = ConstVec(input.data(), input.size());
  for (int l = 0; l < layer_count(); ++l) {
    ConstWeights w(params_.data() + weight_offset(l), dims_[l + 1], dims_[l]);
    ConstVec b(params_.data() + bias_offset(l), dims_[l + 1]);
    Eigen::VectorXd z = w * a + b;
    if (l + 1 < layer_count()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return {a.data(), a.data() + a.size()};
}

Eigen::MatrixXd DenseNet::forward_batch(const Eigen::MatrixXd& inputs, Tape* tape) const {
  if (inputs.rows() != input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "batch rows must equal net input dim");
  }
  if (!inputs.allFinite()) fail(ErrorCode::kNonFiniteInput, "non-finite net input");
  if (tape) tape->activations.assign(1, inputs);
  Eigen::MatrixXd a = inputs;
  for (int l = 0; l < layer_count(); ++l) {
    ConstWeights w(params_.data() + weight_offset(l), dims_[l + 1], dims_[l]);
    ConstVec b(params_.data() + bias_offset(l), dims_[l + 1]);
    Eigen::MatrixXd z = w * a;
    z.colwise() += b;
    if (l + 1 < layer_count()) {
      z = z.cwiseMax(0.0);
      if (tape) tape->activations.push_back(z);
    }
    a = std::move(z);
  }
  return a;
}

void DenseNet::backward_batch(const Tape& tape, const Eigen::MatrixXd& output_grad,
                              std::span<double> grads) const {
  if (grads.size() != params_.size()) {
    fail(ErrorCode::kShapeMismatch, "gradient buffer does not match parameter count");
  }
  if (static_cast<int>(tape.activations.size()) != layer_count() ||
      output_grad.rows() != output_dim() ||
      output_grad.cols() != tape.activations.front().cols()) {
    fail(ErrorCode::kDimensionMismatch, "tape and output gradient do not match the net");
  }
  Eigen::MatrixXd g = output_grad;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const Eigen::MatrixXd& a = tape.activations[l];
    MutWeights dw(grads.data() + weight_offset(l), dims_[l + 1], dims_[l]);
    MutVec db(grads.data() + bias_offset(l), dims_[l + 1]);
    dw.noalias() += g * a.transpose();
    db += g.rowwise().sum();
    if (l > 0) {
      ConstWeights w(params_.data() + weight_offset(l), dims_[l + 1], dims_[l]);
      Eigen::MatrixXd upstream = w.transpose() * g;
      g = (a.array() > 0.0).select(upstream, 0.0);
    }
  }
}

std::vector<double> DenseNet::backward(std::span<const double> input,
                                       std::span<const double> output_gradient) const {
  if (static_cast<int>(output_gradient.size()) != output_dim()) {
    fail(ErrorCode::kDimensionMismatch, "output gradient has wrong length");
  }
  if (static_cast<int>(input.size()) != input_dim()) {
    fail(ErrorCode::kDimensionMismatch, "net input has wrong length");
  }
  Tape tape;
  forward_batch(ConstVec(input.data(), input.size()), &tape);
  std::vector<double> grads(params_.size(), 0.0);
  backward_batch(tape, ConstVec(output_gradient.data(), output_gradient.size()), grads);
  return grads;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    fail(ErrorCode::kShapeMismatch, "adam: parameter, gradient and moment sizes differ");
  }
  if (!all_finite(grads)) fail(ErrorCode::kNonFiniteGradient, "adam: non-finite gradient");
  const AdamConfig& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (size_t k = 0; k < params.size(); ++k) {
    state.m[k] = c.beta1 * state.m[k] + (1.0 - c.beta1) * grads[k];
    state.v[k] = c.beta2 * state.v[k] + (1.0 - c.beta2) * grads[k] * grads[k];
    const double m_hat = state.m[k] / bc1;
    const double v_hat = state.v[k] / bc2;
    params[k] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

int PolicyHead::parameter_count() const {
  if (kind == HeadKind::kBeta) return 2 * dimension;
  return std::accumulate(categories.begin(), categories.end(), 0);
}

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double beta_log_density(double a, double b, double x) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

PolicySample sample_and_logprob(const PolicyHead& head, std::span<const double> params,
                                Rng& rng) {
  check_head_params(head, params);
  PolicySample out;
  if (head.kind == HeadKind::kCategorical) {
    std::vector<double> p;
    size_t offset = 0;
    for (int n : head.categories) {
      auto logits = params.subspan(offset, n);
      const double lse = log_softmax(logits, p);
      const double u = uniform01(rng);
      int chosen = n - 1;
      double cdf = 0.0;
      for (int j = 0; j < n; ++j) {
        cdf += p[j];
        if (u < cdf) {
          chosen = j;
          break;
        }
      }
      out.action.discrete.push_back(chosen);
      out.log_prob += logits[chosen] - lse;
      for (int j = 0; j < n; ++j) {
        if (p[j] > 0.0) out.entropy -= p[j] * (logits[j] - lse);
      }
      offset += n;
    }
    return out;
  }
  constexpr double kEdge = 1e-12;
  for (int d = 0; d < head.dimension; ++d) {
    const double a = 1.0 + softplus(params[2 * d]);
    const double b = 1.0 + softplus(params[2 * d + 1]);
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x_a = ga(rng);
    const double x_b = gb(rng);
    double x = x_a / (x_a + x_b);
    x = std::clamp(x, kEdge, 1.0 - kEdge);
    out.action.continuous.push_back(x);
    out.log_prob += beta_log_density(a, b, x);
    out.entropy += beta_entropy(a, b);
  }
  return out;
}

LogProbEntropy evaluate_action(const PolicyHead& head, std::span<const double> params,
                               const Action& action, double logp_coef, double entropy_coef,
                               std::span<double> grad) {
  check_head_params(head, params);
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != params.size()) {
    fail(ErrorCode::kShapeMismatch, "policy gradient buffer has wrong length");
  }
  LogProbEntropy out;
  if (head.kind == HeadKind::kCategorical) {
    if (action.discrete.size() != head.categories.size()) {
      fail(ErrorCode::kDimensionMismatch, "action does not match categorical head");
    }
    std::vector<double> p;
    size_t offset = 0;
    for (size_t f = 0; f < head.categories.size(); ++f) {
      const int n = head.categories[f];
      const int a = action.discrete[f];
      if (a < 0 || a >= n) fail(ErrorCode::kInvalidAction, "categorical action out of range");
      auto logits = params.subspan(offset, n);
      const double lse = log_softmax(logits, p);
      double h = 0.0;
      for (int j = 0; j < n; ++j) {
        if (p[j] > 0.0) h -= p[j] * (logits[j] - lse);
      }
      out.log_prob += logits[a] - lse;
      out.entropy += h;
      if (want_grad) {
        for (int j = 0; j < n; ++j) {
          const double logp_j = logits[j] - lse;
          const double dlogp = (j == a ? 1.0 : 0.0) - p[j];
          const double dh = p[j] > 0.0 ? -p[j] * (logp_j + h) : 0.0;
          grad[offset + j] += logp_coef * dlogp + entropy_coef * dh;
        }
      }
      offset += n;
    }
    return out;
  }
  if (static_cast<int>(action.continuous.size()) != head.dimension) {
    fail(ErrorCode::kDimensionMismatch, "action does not match Beta head");
  }
  for (int d = 0; d < head.dimension; ++d) {
    const double ra = params[2 * d];
    const double rb = params[2 * d + 1];
    const double a = 1.0 + softplus(ra);
    const double b = 1.0 + softplus(rb);
    const double x = action.continuous[d];
    if (!(x > 0.0 && x < 1.0)) fail(ErrorCode::kInvalidAction, "Beta action outside (0, 1)");
    out.log_prob += beta_log_density(a, b, x);
    out.entropy += beta_entropy(a, b);
    if (want_grad) {
      const double psi_ab = digamma(a + b);
      const double tri_ab = trigamma(a + b);
      const double dlogp_da = std::log(x) - digamma(a) + psi_ab;
      const double dlogp_db = std::log1p(-x) - digamma(b) + psi_ab;
      const double dh_da = -(a - 1.0) * trigamma(a) + (a + b - 2.0) * tri_ab;
      const double dh_db = -(b - 1.0) * trigamma(b) + (a + b - 2.0) * tri_ab;
      grad[2 * d] += (logp_coef * dlogp_da + entropy_coef * dh_da) * sigmoid(ra);
      grad[2 * d + 1] += (logp_coef * dlogp_db + entropy_coef * dh_db) * sigmoid(rb);
    }
  }
  return out;
}

Action mode_action(const PolicyHead& head, std::span<const double> params) {
  check_head_params(head, params);
  Action out;
  if (head.kind == HeadKind::kCategorical) {
    size_t offset = 0;
    for (int n : head.categories) {
      auto logits = params.subspan(offset, n);
      out.discrete.push_back(
          static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin()));
      offset += n;
    }
    return out;
  }
  for (int d = 0; d < head.dimension; ++d) {
    const double a = 1.0 + softplus(params[2 * d]);
    const double b = 1.0 + softplus(params[2 * d + 1]);
    out.continuous.push_back(a / (a + b));
  }
  return out;
}

void save_checkpoint(const std::string& path, const DenseNet& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic));
  write_le<uint32_t>(out, kCheckpointVersion);
  write_le<uint32_t>(out, static_cast<uint32_t>(net.layer_dims().size()));
  for (int d : net.layer_dims()) write_le<uint32_t>(out, static_cast<uint32_t>(d));
  write_le<uint64_t>(out, net.parameter_count());
  for (double p : net.parameters()) write_le<uint64_t>(out, std::bit_cast<uint64_t>(p));
  if (!out) fail(ErrorCode::kIoError, "failed writing checkpoint " + path);
}

DenseNet load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open checkpoint " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCode::kCheckpointMismatch, path + " is not a dagmarl checkpoint");
  }
  if (read_le<uint32_t>(in) != kCheckpointVersion) {
    fail(ErrorCode::kCheckpointMismatch, "unsupported checkpoint version in " + path);
  }
  const uint32_t n_dims = read_le<uint32_t>(in);
  if (n_dims < 2 || n_dims > 64) fail(ErrorCode::kCheckpointMismatch, "bad layer count in " + path);
  std::vector<int> dims;
  for (uint32_t k = 0; k < n_dims; ++k) dims.push_back(static_cast<int>(read_le<uint32_t>(in)));
  DenseNet net(dims);
  if (read_le<uint64_t>(in) != net.parameter_count()) {
    fail(ErrorCode::kCheckpointMismatch, "parameter count does not match dims in " + path);
  }
  for (double& p : net.parameters()) p = std::bit_cast<double>(read_le<uint64_t>(in));
  return net;
}

}  // namespace dagmarl
