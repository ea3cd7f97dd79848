#include "dagmarl/dagmarl.h"

#include <exception>
#include <new>
#include <optional>
#include <string>

#include "dagmarl/config.hpp"
#include "dagmarl/dag.hpp"
#include "dagmarl/experiment.hpp"
#include "dagmarl/plot.hpp"
#include "dagmarl/reward_flow.hpp"
#include "dagmarl/theory.hpp"

struct dagmarl_topology {
  dagmarl::DagTopology dag;
};

struct dagmarl_experiment {
  dagmarl::ExperimentConfig config;
};

namespace {

using dagmarl::ErrorCode;

thread_local std::string last_error;

int set_error(int status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
int guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return DAGMARL_OK;
  } catch (const dagmarl::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DAGMARL_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DAGMARL_INTERNAL, e.what());
  } catch (...) {
    return set_error(DAGMARL_INTERNAL, "unknown failure");
  }
}

void require(const void* p, const char* what) {
  if (!p) dagmarl::fail(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

void copy_list(const std::vector<int>& ids, int* out, size_t capacity, size_t* length) {
  require(length, "length");
  *length = ids.size();
  if (ids.empty()) return;
  require(out, "out");
  if (capacity < ids.size()) {
    dagmarl::fail(ErrorCode::kDimensionMismatch,
                  "buffer holds " + std::to_string(capacity) + ", need " + std::to_string(ids.size()));
  }
  std::copy(ids.begin(), ids.end(), out);
}

}  // namespace

extern "C" {

const char* dagmarl_version(void) { return "1.0.0"; }

const char* dagmarl_status_name(int status) {
  if (status < 0 || status > DAGMARL_INTERNAL) return "Unknown";
  return dagmarl::error_code_name(static_cast<ErrorCode>(status));
}

const char* dagmarl_last_error(void) { return last_error.c_str(); }

int dagmarl_topology_create(int node_count, const int* arcs, int arc_count,
                            dagmarl_topology** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (arc_count < 0) dagmarl::fail(ErrorCode::kInvalidArgument, "negative arc count");
    if (arc_count > 0) require(arcs, "arcs");
    dagmarl::DagSpec spec;
    spec.node_count = node_count;
    for (int k = 0; k < arc_count; ++k) spec.arcs.push_back({arcs[2 * k], arcs[2 * k + 1]});
    *out = new dagmarl_topology{dagmarl::DagTopology(std::move(spec))};
  });
}

void dagmarl_topology_destroy(dagmarl_topology* topology) { delete topology; }

int dagmarl_topology_node_count(const dagmarl_topology* topology, int* out) {
  return guarded([&] {
    require(topology, "topology");
    require(out, "out");
    *out = topology->dag.node_count();
  });
}

int dagmarl_topology_arc_count(const dagmarl_topology* topology, int* out) {
  return guarded([&] {
    require(topology, "topology");
    require(out, "out");
    *out = topology->dag.arc_count();
  });
}

int dagmarl_topology_order(const dagmarl_topology* topology, int* out, size_t capacity,
                           size_t* length) {
  return guarded([&] {
    require(topology, "topology");
    copy_list(topology->dag.order(), out, capacity, length);
  });
}

int dagmarl_topology_ancestors(const dagmarl_topology* topology, int node, int* out,
                               size_t capacity, size_t* length) {
  return guarded([&] {
    require(topology, "topology");
    copy_list(topology->dag.ancestors(node), out, capacity, length);
  });
}

int dagmarl_topology_descendants(const dagmarl_topology* topology, int node, int* out,
                                 size_t capacity, size_t* length) {
  return guarded([&] {
    require(topology, "topology");
    copy_list(topology->dag.descendants(node), out, capacity, length);
  });
}

int dagmarl_topology_sinks(const dagmarl_topology* topology, int* out, size_t capacity,
                           size_t* length) {
  return guarded([&] {
    require(topology, "topology");
    copy_list(topology->dag.sinks(), out, capacity, length);
  });
}

int dagmarl_synthetic_budget(double q, double mean_total_reward, double mean_goal_periods,
                             double* out) {
  return guarded([&] {
    require(out, "out");
    *out = dagmarl::synthetic_budget(q, {mean_total_reward, mean_goal_periods});
  });
}

int dagmarl_distribute(const dagmarl_topology* topology, const double* node_values,
                       const double* arc_values, double budget, double* sr_out) {
  return guarded([&] {
    require(topology, "topology");
    require(node_values, "node_values");
    require(sr_out, "sr_out");
    const int n = topology->dag.node_count();
    const int m = topology->dag.arc_count();
    if (m > 0) require(arc_values, "arc_values");
    dagmarl::RgdOutput output;
    output.node_values.assign(node_values, node_values + n);
    if (m > 0) output.arc_values.assign(arc_values, arc_values + m);
    const std::vector<double> sr = dagmarl::distribute(topology->dag, output, budget);
    std::copy(sr.begin(), sr.end(), sr_out);
  });
}

int dagmarl_experiment_create(dagmarl_experiment** out) {
  return guarded([&] {
    require(out, "out");
    *out = new dagmarl_experiment{};
  });
}

int dagmarl_experiment_load(const char* path, dagmarl_experiment** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    require(path, "path");
    *out = new dagmarl_experiment{dagmarl::load_config(path)};
  });
}

int dagmarl_experiment_set(dagmarl_experiment* experiment, const char* key, const char* value) {
  return guarded([&] {
    require(experiment, "experiment");
    require(key, "key");
    require(value, "value");
    dagmarl::apply_setting(experiment->config, key, value);
  });
}

void dagmarl_experiment_destroy(dagmarl_experiment* experiment) { delete experiment; }

int dagmarl_train(const dagmarl_experiment* experiment, dagmarl_episode_callback callback,
                  void* user_data) {
  return guarded([&] {
    require(experiment, "experiment");
    std::function<void(const dagmarl::EpisodeLog&)> hook;
    if (callback) {
      hook = [&](const dagmarl::EpisodeLog& log) { callback(log.episode, log.team_reward, user_data); };
    }
    dagmarl::run_training(experiment->config, hook);
  });
}

void dagmarl_eval_options_init(dagmarl_eval_options* options) {
  if (!options) return;
  const dagmarl::EvaluationOptions defaults;
  options->episodes = defaults.episodes;
  options->seed = defaults.seed;
  options->stochastic = defaults.stochastic ? 1 : 0;
  options->bins = defaults.bins;
  options->threads = defaults.threads;
}

int dagmarl_evaluate(const char* run_dir, const dagmarl_eval_options* options,
                     dagmarl_eval_summary* out) {
  return guarded([&] {
    require(run_dir, "run_dir");
    dagmarl::EvaluationOptions opts;
    if (options) {
      opts.episodes = options->episodes;
      opts.seed = options->seed;
      opts.stochastic = options->stochastic != 0;
      opts.bins = options->bins;
      opts.threads = options->threads;
    }
    const dagmarl::EvaluationReport report = dagmarl::evaluate_run(run_dir, opts);
    if (out) {
      out->episodes = static_cast<int>(report.rewards.size());
      out->mean = report.summary.mean;
      out->median = report.summary.median;
      out->stddev = report.summary.stddev;
      out->min = report.summary.min;
      out->max = report.summary.max;
    }
  });
}

int dagmarl_verify_theorem(int trials, uint64_t seed, double gamma, double tail,
                           dagmarl_theorem_report* out) {
  return guarded([&] {
    require(out, "out");
    const dagmarl::CampaignReport r = dagmarl::run_theorem_campaign({trials, seed, gamma, tail});
    *out = {r.trials,          r.violations,        r.max_violation,     r.tightest_slack,
            r.equality_checks, r.equality_failures, r.max_equality_error};
  });
}

int dagmarl_plot(const char* const* csv_paths, size_t count, const char* svg_path, int window,
                 int normalize, const char* title) {
  return guarded([&] {
    require(svg_path, "svg_path");
    if (count > 0) require(csv_paths, "csv_paths");
    std::vector<std::string> paths;
    for (size_t i = 0; i < count; ++i) {
      require(csv_paths[i], "csv path");
      paths.emplace_back(csv_paths[i]);
    }
    dagmarl::CurveOptions opts;
    opts.window = window;
    opts.normalize = normalize != 0;
    if (title) opts.title = title;
    dagmarl::plot_episode_csvs(paths, svg_path, opts);
  });
}

}  // extern "C"
