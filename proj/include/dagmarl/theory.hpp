#ifndef DAGMARL_THEORY_HPP_
#define DAGMARL_THEORY_HPP_

#include <vector>

#include "dagmarl/micro_env.hpp"
#include "dagmarl/rng.hpp"

namespace dagmarl {

// pi^i(a | s_i) per node: probs[node][state][action].
struct TabularPolicy {
  std::vector<std::vector<std::vector<double>>> probs;
};

TabularPolicy random_tabular_policy(const MicroDagEnv& env, Rng& rng);
// Every node plays `actions[i]` in every state.
TabularPolicy deterministic_policy(const MicroDagEnv& env, const std::vector<int>& actions);
// Throws kInvalidDistribution when a row is not a distribution over the
// node's actions.
void check_policy(const MicroDagEnv& env, const TabularPolicy& policy);

// f_ik over the contexts of sink k, for every i in Delta(k):
// table[k][p][context], where p is i's position in ancestors(k). Non-sinks
// have an empty table.
struct ContributionFunction {
  std::vector<std::vector<std::vector<double>>> table;

  double value(const MicroDagEnv& env, NodeId k, NodeId i, int context) const;
};

// f_ik = `each` everywhere.
ContributionFunction constant_contribution(const MicroDagEnv& env, double each);
ContributionFunction scaled(const ContributionFunction& f, double factor);
// Non-negative entries whose sum over Delta(k) is u ~ U[0, 1] per (k,
// context); u = 1 when `tight`.
ContributionFunction sample_admissible_contribution(const MicroDagEnv& env, Rng& rng,
                                                    bool tight = false);
// Throws kInadmissibleContribution on a negative entry or a row summing
// above 1 (beyond rounding).
void check_admissible(const MicroDagEnv& env, const ContributionFunction& f);
bool is_tight(const MicroDagEnv& env, const ContributionFunction& f, double tolerance = 1e-12);

enum class ValueMethod { kDynamicProgramming, kEnumeration };

// Discounted values from the initial distribution, truncated at the
// environment's horizon. per_node is zero for nodes without a stream.
struct ValueReport {
  std::vector<double> per_node;
  double total = 0.0;
  double tail_bound = 0.0;
};

// V_k per sink. Enumeration throws kStateSpaceTooLarge beyond 1e6
// trajectories.
ValueReport exact_values(const MicroDagEnv& env, const TabularPolicy& policy, double gamma,
                         ValueMethod method = ValueMethod::kDynamicProgramming);
// Synthetic value per node under contribution f (checked admissible).
ValueReport synthetic_values(const MicroDagEnv& env, const TabularPolicy& policy,
                             const ContributionFunction& f, double gamma,
                             ValueMethod method = ValueMethod::kDynamicProgramming);

struct Theorem1Report {
  double synthetic_total = 0.0;
  double value_total = 0.0;
  double slack = 0.0;  // value_total - synthetic_total
  double tail_bound = 0.0;
  bool holds = false;  // synthetic_total <= value_total + 2 * tail_bound
  bool tight = false;  // every f row sums to 1
  bool equality = false;  // tight and |slack| <= equality_tolerance
};

constexpr double kEqualityTolerance = 1e-9;

// Throws kHypothesisViolated on a negative sink reward.
Theorem1Report verify_theorem1(const MicroDagEnv& env, const TabularPolicy& policy,
                               const ContributionFunction& f, double gamma);

// Smallest horizon whose tail bound is at most `tail`.
int horizon_for_tail(double max_team_reward, double gamma, double tail);

struct CampaignOptions {
  int trials = 200;
  uint64_t seed = 1;
  double gamma = 0.9;
  double tail = 1e-6;
};

struct CampaignReport {
  int trials = 0;
  int violations = 0;
  double max_violation = 0.0;   // max of synthetic - value - 2 * tail, floored at 0
  double tightest_slack = 0.0;  // min slack over the sampled-f trials
  int equality_checks = 0;
  int equality_failures = 0;
  double max_equality_error = 0.0;
};

// Each trial draws a micro env, a stochastic tabular policy and an
// admissible f, checks the inequality, then repeats with a tight f and
// checks equality.
CampaignReport run_theorem_campaign(const CampaignOptions& options);

}  // namespace dagmarl

#endif  // DAGMARL_THEORY_HPP_
