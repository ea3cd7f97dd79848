#include "dagmarl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace dagmarl {

namespace {

using Channels = std::function<void(const std::vector<int>& states,
                                    const std::vector<int>& actions, std::vector<double>& out)>;

constexpr double kMaxTrajectories = 1e6;

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) fail(ErrorCode::kInvalidArgument, "gamma must be in [0, 1)");
}

// Joint tables shared by both value methods.
struct JointModel {
  std::vector<std::vector<int>> states;   // decoded joint states
  std::vector<std::vector<int>> actions;  // decoded joint actions
  std::vector<double> initial;            // [joint state]
  std::vector<std::vector<double>> pi;    // [joint state][joint action]
  // next[s][a][s'] probabilities
  std::vector<std::vector<std::vector<double>>> next;
  std::vector<std::vector<std::vector<double>>> reward;  // [s][a][channel]
};

JointModel build_joint(const MicroDagEnv& env, const TabularPolicy& policy,
                       const Channels& channels) {
  check_policy(env, policy);
  const int n = env.node_count();
  const int ns = env.joint_state_count();
  const int na = env.joint_action_count();
  JointModel m;
  for (int s = 0; s < ns; ++s) m.states.push_back(env.decode_states(s));
  for (int a = 0; a < na; ++a) m.actions.push_back(env.decode_actions(a));
  m.initial.assign(ns, 1.0);
  m.pi.assign(ns, std::vector<double>(na, 1.0));
  m.next.assign(ns, std::vector<std::vector<double>>(na, std::vector<double>(ns, 1.0)));
  m.reward.assign(ns, std::vector<std::vector<double>>(na, std::vector<double>(n, 0.0)));
  for (int s = 0; s < ns; ++s) {
    const auto& st = m.states[s];
    for (NodeId i = 0; i < n; ++i) m.initial[s] *= env.spec().initial[i][st[i]];
    for (int a = 0; a < na; ++a) {
      const auto& ac = m.actions[a];
      for (NodeId i = 0; i < n; ++i) m.pi[s][a] *= policy.probs[i][st[i]][ac[i]];
      std::vector<int> ctx(n);
      for (NodeId i = 0; i < n; ++i) ctx[i] = env.context_index(i, st, ac);
      for (int s2 = 0; s2 < ns; ++s2) {
        const auto& st2 = m.states[s2];
        for (NodeId i = 0; i < n; ++i) m.next[s][a][s2] *= env.spec().transition[i][ctx[i]][st2[i]];
      }
      channels(st, ac, m.reward[s][a]);
    }
  }
  return m;
}

std::vector<double> dp_values(const JointModel& m, int channels, int horizon, double gamma) {
  const size_t ns = m.states.size();
  const size_t na = m.actions.size();
  std::vector<std::vector<double>> v(ns, std::vector<double>(channels, 0.0));
  std::vector<std::vector<double>> prev(ns, std::vector<double>(channels, 0.0));
  for (int h = horizon - 1; h >= 0; --h) {
    std::swap(v, prev);
    for (size_t s = 0; s < ns; ++s) {
      std::fill(v[s].begin(), v[s].end(), 0.0);
      for (size_t a = 0; a < na; ++a) {
        const double p = m.pi[s][a];
        if (p == 0.0) continue;
        for (int c = 0; c < channels; ++c) {
          double future = 0.0;
          for (size_t s2 = 0; s2 < ns; ++s2) future += m.next[s][a][s2] * prev[s2][c];
          v[s][c] += p * (m.reward[s][a][c] + gamma * future);
        }
      }
    }
  }
  std::vector<double> out(channels, 0.0);
  for (size_t s = 0; s < ns; ++s) {
    for (int c = 0; c < channels; ++c) out[c] += m.initial[s] * v[s][c];
  }
  return out;
}

void enumerate(const JointModel& m, int s, int t, int horizon, double gamma, double weight,
               std::vector<double>& out) {
  if (t == horizon) return;
  const double discount = std::pow(gamma, t);
  for (size_t a = 0; a < m.actions.size(); ++a) {
    const double pa = weight * m.pi[s][a];
    for (size_t c = 0; c < out.size(); ++c) out[c] += pa * discount * m.reward[s][a][c];
    for (size_t s2 = 0; s2 < m.states.size(); ++s2) {
      enumerate(m, static_cast<int>(s2), t + 1, horizon, gamma, pa * m.next[s][a][s2], out);
    }
  }
}

std::vector<double> enumeration_values(const JointModel& m, int channels, int horizon,
                                       double gamma) {
  const double per_step = static_cast<double>(m.actions.size()) * m.states.size();
  const double count = m.states.size() * std::pow(per_step, horizon);
  if (count > kMaxTrajectories) {
    fail(ErrorCode::kStateSpaceTooLarge,
         "trajectory enumeration needs " + std::to_string(count) + " paths (limit 1e6)");
  }
  std::vector<double> out(channels, 0.0);
  for (size_t s = 0; s < m.states.size(); ++s) {
    enumerate(m, static_cast<int>(s), 0, horizon, gamma, m.initial[s], out);
  }
  return out;
}

ValueReport values_for(const MicroDagEnv& env, const TabularPolicy& policy, double gamma,
                       ValueMethod method, const Channels& channels) {
  check_gamma(gamma);
  const int n = env.node_count();
  const JointModel m = build_joint(env, policy, channels);
  ValueReport report;
  report.per_node = method == ValueMethod::kDynamicProgramming
                        ? dp_values(m, n, env.horizon(), gamma)
                        : enumeration_values(m, n, env.horizon(), gamma);
  for (double v : report.per_node) report.total += v;
  report.tail_bound = env.tail_bound(gamma);
  return report;
}

}  // namespace

TabularPolicy random_tabular_policy(const MicroDagEnv& env, Rng& rng) {
  TabularPolicy policy;
  for (NodeId i = 0; i < env.node_count(); ++i) {
    std::vector<std::vector<double>> rows;
    for (int s = 0; s < env.state_count(i); ++s) {
      std::vector<double> row(env.action_count(i));
      double total = 0.0;
      for (double& p : row) {
        p = -std::log1p(-uniform01(rng));
        total += p;
      }
      for (double& p : row) p = total > 0.0 ? p / total : 1.0 / row.size();
      rows.push_back(std::move(row));
    }
    policy.probs.push_back(std::move(rows));
  }
  return policy;
}

TabularPolicy deterministic_policy(const MicroDagEnv& env, const std::vector<int>& actions) {
  if (static_cast<int>(actions.size()) != env.node_count()) {
    fail(ErrorCode::kDimensionMismatch, "need one action per node");
  }
  TabularPolicy policy;
  for (NodeId i = 0; i < env.node_count(); ++i) {
    if (actions[i] < 0 || actions[i] >= env.action_count(i)) {
      fail(ErrorCode::kInvalidAction, "action out of range for node " + std::to_string(i));
    }
    std::vector<double> row(env.action_count(i), 0.0);
    row[actions[i]] = 1.0;
    policy.probs.emplace_back(env.state_count(i), row);
  }
  return policy;
}

void check_policy(const MicroDagEnv& env, const TabularPolicy& policy) {
  if (static_cast<int>(policy.probs.size()) != env.node_count()) {
    fail(ErrorCode::kInvalidDistribution, "policy needs one table per node");
  }
  for (NodeId i = 0; i < env.node_count(); ++i) {
    if (static_cast<int>(policy.probs[i].size()) != env.state_count(i)) {
      fail(ErrorCode::kInvalidDistribution, "policy needs one row per node state");
    }
    for (const auto& row : policy.probs[i]) {
      if (static_cast<int>(row.size()) != env.action_count(i)) {
        fail(ErrorCode::kInvalidDistribution, "policy row has the wrong action count");
      }
      double total = 0.0;
      for (double p : row) {
        if (!std::isfinite(p) || p < 0.0) {
          fail(ErrorCode::kInvalidDistribution, "policy has a negative or non-finite probability");
        }
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::kInvalidDistribution, "policy row does not sum to 1");
    }
  }
}

double ContributionFunction::value(const MicroDagEnv& env, NodeId k, NodeId i, int context) const {
  const NodeSet& delta = env.topology().ancestors(k);
  const auto it = std::lower_bound(delta.begin(), delta.end(), i);
  if (it == delta.end() || *it != i) return 0.0;
  return table[k][it - delta.begin()][context];
}

ContributionFunction constant_contribution(const MicroDagEnv& env, double each) {
  ContributionFunction f;
  f.table.resize(env.node_count());
  for (NodeId k : env.topology().sinks()) {
    f.table[k].assign(env.topology().ancestors(k).size(),
                      std::vector<double>(env.context_count(k), each));
  }
  return f;
}

ContributionFunction scaled(const ContributionFunction& f, double factor) {
  ContributionFunction out = f;
  for (auto& per_sink : out.table) {
    for (auto& row : per_sink) {
      for (double& x : row) x *= factor;
    }
  }
  return out;
}

ContributionFunction sample_admissible_contribution(const MicroDagEnv& env, Rng& rng, bool tight) {
  ContributionFunction f = constant_contribution(env, 0.0);
  for (NodeId k : env.topology().sinks()) {
    const size_t members = env.topology().ancestors(k).size();
    for (int c = 0; c < env.context_count(k); ++c) {
      std::vector<double> w(members);
      double total = 0.0;
      for (double& x : w) {
        x = -std::log1p(-uniform01(rng));
        total += x;
      }
      const double u = tight ? 1.0 : uniform01(rng);
      for (size_t p = 0; p < members; ++p) {
        f.table[k][p][c] = total > 0.0 ? u * w[p] / total : u / members;
      }
    }
  }
  return f;
}

void check_admissible(const MicroDagEnv& env, const ContributionFunction& f) {
  if (static_cast<int>(f.table.size()) != env.node_count()) {
    fail(ErrorCode::kInadmissibleContribution, "contribution needs one table per node");
  }
  for (NodeId k = 0; k < env.node_count(); ++k) {
    const size_t members = env.topology().is_sink(k) ? env.topology().ancestors(k).size() : 0;
    if (f.table[k].size() != members) {
      fail(ErrorCode::kInadmissibleContribution, "contribution table has the wrong member count");
    }
    for (int c = 0; members > 0 && c < env.context_count(k); ++c) {
      double total = 0.0;
      for (const auto& row : f.table[k]) {
        if (static_cast<int>(row.size()) != env.context_count(k)) {
          fail(ErrorCode::kInadmissibleContribution, "contribution row has the wrong context count");
        }
        if (!(row[c] >= 0.0) || !std::isfinite(row[c])) {
          fail(ErrorCode::kInadmissibleContribution, "contribution values must be finite and >= 0");
        }
        total += row[c];
      }
      if (total > 1.0 + 1e-12) {
        fail(ErrorCode::kInadmissibleContribution,
             "contributions to sink " + std::to_string(k) + " sum to " + std::to_string(total) + " > 1");
      }
    }
  }
}

bool is_tight(const MicroDagEnv& env, const ContributionFunction& f, double tolerance) {
  for (NodeId k : env.topology().sinks()) {
    for (int c = 0; c < env.context_count(k); ++c) {
      double total = 0.0;
      for (const auto& row : f.table[k]) total += row[c];
      if (std::abs(total - 1.0) > tolerance) return false;
    }
  }
  return true;
}

ValueReport exact_values(const MicroDagEnv& env, const TabularPolicy& policy, double gamma,
                         ValueMethod method) {
  const DagTopology& topo = env.topology();
  Channels channels = [&](const std::vector<int>& s, const std::vector<int>& a,
                          std::vector<double>& out) {
    for (NodeId k : topo.sinks()) out[k] = env.reward(k, env.context_index(k, s, a));
  };
  return values_for(env, policy, gamma, method, channels);
}

ValueReport synthetic_values(const MicroDagEnv& env, const TabularPolicy& policy,
                             const ContributionFunction& f, double gamma, ValueMethod method) {
  check_admissible(env, f);
  const DagTopology& topo = env.topology();
  Channels channels = [&](const std::vector<int>& s, const std::vector<int>& a,
                          std::vector<double>& out) {
    for (NodeId k : topo.sinks()) {
      const int ctx = env.context_index(k, s, a);
      const double r = env.reward(k, ctx);
      const NodeSet& delta = topo.ancestors(k);
      for (size_t p = 0; p < delta.size(); ++p) out[delta[p]] += f.table[k][p][ctx] * r;
    }
  };
  return values_for(env, policy, gamma, method, channels);
}

Theorem1Report verify_theorem1(const MicroDagEnv& env, const TabularPolicy& policy,
                               const ContributionFunction& f, double gamma) {
  if (env.has_negative_reward()) {
    fail(ErrorCode::kHypothesisViolated, "a sink reward is negative; the bound needs r >= 0");
  }
  const ValueReport synthetic = synthetic_values(env, policy, f, gamma);
  const ValueReport exact = exact_values(env, policy, gamma);
  Theorem1Report report;
  report.synthetic_total = synthetic.total;
  report.value_total = exact.total;
  report.slack = exact.total - synthetic.total;
  report.tail_bound = exact.tail_bound;
  report.holds = synthetic.total <= exact.total + 2.0 * exact.tail_bound;
  report.tight = is_tight(env, f);
  report.equality = report.tight && std::abs(report.slack) <= kEqualityTolerance;
  return report;
}

int horizon_for_tail(double max_team_reward, double gamma, double tail) {
  check_gamma(gamma);
  if (!(tail > 0.0)) fail(ErrorCode::kInvalidArgument, "tail tolerance must be positive");
  int h = 1;
  while (std::pow(gamma, h) * max_team_reward / (1.0 - gamma) > tail) ++h;
  return h;
}

CampaignReport run_theorem_campaign(const CampaignOptions& options) {
  if (options.trials < 1) fail(ErrorCode::kInvalidArgument, "campaign needs at least one trial");
  CampaignReport report;
  report.tightest_slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < options.trials; ++t) {
    Rng rng(derive_seed(options.seed, "theorem-trial", static_cast<uint64_t>(t)));
    const MicroDagEnv draft = random_micro_env(rng);
    MicroDagSpec spec = draft.spec();
    spec.horizon = horizon_for_tail(draft.max_team_reward(), options.gamma, options.tail);
    const MicroDagEnv env(std::move(spec));
    const TabularPolicy policy = random_tabular_policy(env, rng);

    const ContributionFunction f = sample_admissible_contribution(env, rng);
    const Theorem1Report r = verify_theorem1(env, policy, f, options.gamma);
    ++report.trials;
    const double excess = r.synthetic_total - r.value_total - 2.0 * options.tail;
    if (!r.holds || excess > 0.0) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, excess);
    }
    report.tightest_slack = std::min(report.tightest_slack, r.slack);

    const ContributionFunction tight = sample_admissible_contribution(env, rng, true);
    const Theorem1Report e = verify_theorem1(env, policy, tight, options.gamma);
    ++report.equality_checks;
    report.max_equality_error = std::max(report.max_equality_error, std::abs(e.slack));
    if (!e.equality) ++report.equality_failures;
  }
  return report;
}

}  // namespace dagmarl
