#ifndef DAGMARL_DAGMARL_H_
#define DAGMARL_DAGMARL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DAGMARL_API __declspec(dllexport)
#else
#define DAGMARL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

// Status codes; every function below returns one. On failure a message is
// available from dagmarl_last_error() on the calling thread.
typedef enum dagmarl_status {
  DAGMARL_OK = 0,
  DAGMARL_CYCLE_DETECTED = 1,
  DAGMARL_EMPTY_GRAPH = 2,
  DAGMARL_INVALID_NODE = 3,
  DAGMARL_INVALID_ARC = 4,
  DAGMARL_DIMENSION_MISMATCH = 5,
  DAGMARL_NON_FINITE_INPUT = 6,
  DAGMARL_SHAPE_MISMATCH = 7,
  DAGMARL_NON_FINITE_GRADIENT = 8,
  DAGMARL_NON_FINITE_PARAMS = 9,
  DAGMARL_EMPTY_BATCH = 10,
  DAGMARL_NON_FINITE_LOSS = 11,
  DAGMARL_INVALID_TOPOLOGY = 12,
  DAGMARL_INVALID_ACTION = 13,
  DAGMARL_VERSION_MISMATCH = 14,
  DAGMARL_INVALID_DISTRIBUTION = 15,
  DAGMARL_STATE_SPACE_TOO_LARGE = 16,
  DAGMARL_INADMISSIBLE_CONTRIBUTION = 17,
  DAGMARL_HYPOTHESIS_VIOLATED = 18,
  DAGMARL_SNAPSHOT_REQUIRED = 19,
  DAGMARL_CONFIG_ERROR = 20,
  DAGMARL_IO_ERROR = 21,
  DAGMARL_EMPTY_SERIES = 22,
  DAGMARL_CHECKPOINT_MISMATCH = 23,
  DAGMARL_SCHEMA_MISMATCH = 24,
  DAGMARL_INVALID_ARGUMENT = 25,
  DAGMARL_INTERNAL = 26
} dagmarl_status;

typedef struct dagmarl_topology dagmarl_topology;
typedef struct dagmarl_experiment dagmarl_experiment;

DAGMARL_API const char* dagmarl_version(void);
DAGMARL_API const char* dagmarl_status_name(int status);
// Message of the last failed call on this thread; "" after a success.
DAGMARL_API const char* dagmarl_last_error(void);

// arcs holds arc_count (from, to) pairs.
DAGMARL_API int dagmarl_topology_create(int node_count, const int* arcs, int arc_count,
                                        dagmarl_topology** out);
DAGMARL_API void dagmarl_topology_destroy(dagmarl_topology* topology);
DAGMARL_API int dagmarl_topology_node_count(const dagmarl_topology* topology, int* out);
DAGMARL_API int dagmarl_topology_arc_count(const dagmarl_topology* topology, int* out);

// List queries write up to `capacity` ids into `out` and the full length
// into `*length`. A short buffer gives DAGMARL_DIMENSION_MISMATCH.
DAGMARL_API int dagmarl_topology_order(const dagmarl_topology* topology, int* out,
                                       size_t capacity, size_t* length);
DAGMARL_API int dagmarl_topology_ancestors(const dagmarl_topology* topology, int node, int* out,
                                           size_t capacity, size_t* length);
DAGMARL_API int dagmarl_topology_descendants(const dagmarl_topology* topology, int node,
                                             int* out, size_t capacity, size_t* length);
DAGMARL_API int dagmarl_topology_sinks(const dagmarl_topology* topology, int* out,
                                       size_t capacity, size_t* length);

DAGMARL_API int dagmarl_synthetic_budget(double q, double mean_total_reward,
                                         double mean_goal_periods, double* out);
// node_values: one per node; arc_values: one per arc in creation order;
// sr_out: one per node.
DAGMARL_API int dagmarl_distribute(const dagmarl_topology* topology, const double* node_values,
                                   const double* arc_values, double budget, double* sr_out);

// Experiments: defaults, or a config file, then "section.key" overrides.
DAGMARL_API int dagmarl_experiment_create(dagmarl_experiment** out);
DAGMARL_API int dagmarl_experiment_load(const char* path, dagmarl_experiment** out);
DAGMARL_API int dagmarl_experiment_set(dagmarl_experiment* experiment, const char* key,
                                       const char* value);
DAGMARL_API void dagmarl_experiment_destroy(dagmarl_experiment* experiment);

typedef void (*dagmarl_episode_callback)(int episode, double team_reward, void* user_data);

// Writes episode logs and checkpoints under the experiment's output
// directory. The callback may be NULL.
DAGMARL_API int dagmarl_train(const dagmarl_experiment* experiment,
                              dagmarl_episode_callback callback, void* user_data);

typedef struct dagmarl_eval_options {
  int episodes;
  uint64_t seed;
  int stochastic;
  int bins;
  int threads;
} dagmarl_eval_options;

typedef struct dagmarl_eval_summary {
  int episodes;
  double mean;
  double median;
  double stddev;
  double min;
  double max;
} dagmarl_eval_summary;

DAGMARL_API void dagmarl_eval_options_init(dagmarl_eval_options* options);
// Evaluates the trained run in run_dir and writes its reports there.
DAGMARL_API int dagmarl_evaluate(const char* run_dir, const dagmarl_eval_options* options,
                                 dagmarl_eval_summary* out);

typedef struct dagmarl_theorem_report {
  int trials;
  int violations;
  double max_violation;
  double tightest_slack;
  int equality_checks;
  int equality_failures;
  double max_equality_error;
} dagmarl_theorem_report;

DAGMARL_API int dagmarl_verify_theorem(int trials, uint64_t seed, double gamma, double tail,
                                       dagmarl_theorem_report* out);

DAGMARL_API int dagmarl_plot(const char* const* csv_paths, size_t count, const char* svg_path,
                             int window, int normalize, const char* title);

#ifdef __cplusplus
}
#endif

#endif  // DAGMARL_DAGMARL_H_
