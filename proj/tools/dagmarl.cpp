#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dagmarl/dagmarl.h"

namespace {

constexpr const char* kUsage =
    "usage: dagmarl <command> [options]\n"
    "\n"
    "commands:\n"
    "  train           train agents, write episodes.csv and checkpoints under --out\n"
    "  evaluate        run frozen policies of a trained run, write a reward histogram\n"
    "  verify-theorem  check the synthetic-value bound on random micro environments\n"
    "  plot            render smoothed team-reward curves from episode CSVs as SVG\n"
    "\n"
    "run 'dagmarl <command> --help' for the options of a command.\n";

int report_failure(int status) {
  std::cerr << "dagmarl: " << dagmarl_status_name(status) << ": " << dagmarl_last_error() << "\n";
  return 1;
}

// Usage errors exit with 2, --help with 0.
int usage_exit(const CLI::App& app, const CLI::ParseError& e) {
  return app.exit(e) == 0 ? 0 : 2;
}

struct ExperimentHandle {
  dagmarl_experiment* ptr = nullptr;
  ~ExperimentHandle() { dagmarl_experiment_destroy(ptr); }
};

void print_progress(int episode, double team_reward, void* user_data) {
  const int every = *static_cast<const int*>(user_data);
  if (every > 0 && (episode + 1) % every == 0) {
    std::fprintf(stderr, "episode %d  team reward %.3f\n", episode + 1, team_reward);
  }
}

int run_train(const std::vector<std::string>& args) {
  CLI::App app{"Train agents on an environment", "dagmarl train"};
  std::string config, mode, out;
  std::vector<std::string> sets;
  long long seed = -1;
  int episodes = -1, window = -1, bins = -1, progress = 0;
  app.add_option("--config", config, "experiment file");
  app.add_option("--mode", mode, "gs | srm | lfm | rfm | proposed | diff-m | cap-m");
  app.add_option("--seed", seed, "master seed")->check(CLI::NonNegativeNumber);
  app.add_option("--episodes", episodes, "training episodes")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  app.add_option("--window", window, "moving-average window")->check(CLI::PositiveNumber);
  app.add_option("--bins", bins, "histogram bins")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "section.key=value override, repeatable");
  app.add_option("--progress", progress, "print every N episodes");
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return usage_exit(app, e);
  }

  ExperimentHandle exp;
  int status = config.empty() ? dagmarl_experiment_create(&exp.ptr)
                              : dagmarl_experiment_load(config.c_str(), &exp.ptr);
  if (status != DAGMARL_OK) return report_failure(status);

  std::vector<std::pair<std::string, std::string>> settings;
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "dagmarl: --set expects section.key=value, got '" << s << "'\n";
      return 2;
    }
    settings.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!mode.empty()) settings.emplace_back("experiment.mode", mode);
  if (seed >= 0) settings.emplace_back("experiment.seed", std::to_string(seed));
  if (episodes > 0) settings.emplace_back("experiment.episodes", std::to_string(episodes));
  if (!out.empty()) settings.emplace_back("experiment.out", out);
  if (window > 0) settings.emplace_back("experiment.window", std::to_string(window));
  if (bins > 0) settings.emplace_back("experiment.bins", std::to_string(bins));
  for (const auto& [key, value] : settings) {
    status = dagmarl_experiment_set(exp.ptr, key.c_str(), value.c_str());
    if (status != DAGMARL_OK) return report_failure(status);
  }
  status = dagmarl_train(exp.ptr, progress > 0 ? print_progress : nullptr, &progress);
  return status == DAGMARL_OK ? 0 : report_failure(status);
}

int run_evaluate(const std::vector<std::string>& args) {
  CLI::App app{"Evaluate a trained run", "dagmarl evaluate"};
  std::string run;
  dagmarl_eval_options opts;
  dagmarl_eval_options_init(&opts);
  bool stochastic = false;
  app.add_option("--run,--out", run, "directory written by train")->required();
  app.add_option("--episodes", opts.episodes, "evaluation episodes")->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "evaluation seed");
  app.add_option("--bins", opts.bins, "histogram bins")->check(CLI::PositiveNumber);
  app.add_option("--threads", opts.threads, "worker threads, 0 for all cores");
  app.add_flag("--stochastic", stochastic, "sample actions instead of the mode");
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return usage_exit(app, e);
  }
  opts.stochastic = stochastic ? 1 : 0;
  dagmarl_eval_summary summary;
  const int status = dagmarl_evaluate(run.c_str(), &opts, &summary);
  if (status != DAGMARL_OK) return report_failure(status);
  nlohmann::ordered_json j;
  j["episodes"] = summary.episodes;
  j["mean"] = summary.mean;
  j["median"] = summary.median;
  j["std"] = summary.stddev;
  j["min"] = summary.min;
  j["max"] = summary.max;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_verify(const std::vector<std::string>& args) {
  CLI::App app{"Check the synthetic-value bound", "dagmarl verify-theorem"};
  int trials = 200;
  uint64_t seed = 1;
  double gamma = 0.9, tail = 1e-6;
  app.add_option("--trials", trials, "random instances")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "campaign seed");
  app.add_option("--gamma", gamma, "discount factor")->check(CLI::Range(0.0, 1.0));
  app.add_option("--tail", tail, "horizon truncation bound")->check(CLI::PositiveNumber);
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return usage_exit(app, e);
  }
  dagmarl_theorem_report r;
  const int status = dagmarl_verify_theorem(trials, seed, gamma, tail, &r);
  if (status != DAGMARL_OK) return report_failure(status);
  nlohmann::ordered_json j;
  j["trials"] = r.trials;
  j["violations"] = r.violations;
  j["max_violation"] = r.max_violation;
  j["tightest_slack"] = r.tightest_slack;
  j["equality_checks"] = r.equality_checks;
  j["equality_failures"] = r.equality_failures;
  j["max_equality_error"] = r.max_equality_error;
  j["holds"] = r.violations == 0 && r.equality_failures == 0;
  std::cout << j.dump(2) << "\n";
  return r.violations == 0 && r.equality_failures == 0 ? 0 : 1;
}

int run_plot(const std::vector<std::string>& args) {
  CLI::App app{"Render team-reward curves", "dagmarl plot"};
  std::vector<std::string> csvs;
  std::string out = "curves.svg", title = "team reward";
  int window = 100;
  bool normalize = false;
  app.add_option("csv", csvs, "episode CSVs, one curve each")->required();
  app.add_option("--out", out, "SVG path");
  app.add_option("--window", window, "moving-average window")->check(CLI::PositiveNumber);
  app.add_option("--title", title, "plot title");
  app.add_flag("--normalize", normalize, "min-max normalize each curve");
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return usage_exit(app, e);
  }
  std::vector<const char*> paths;
  for (const std::string& p : csvs) paths.push_back(p.c_str());
  const int status =
      dagmarl_plot(paths.data(), paths.size(), out.c_str(), window, normalize ? 1 : 0, title.c_str());
  return status == DAGMARL_OK ? 0 : report_failure(status);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 2;
  }
  const std::string command = argv[1];
  if (command == "--help" || command == "-h" || command == "help") {
    std::cout << kUsage;
    return 0;
  }
  const std::vector<std::string> args(argv + 2, argv + argc);
  if (command == "train") return run_train(args);
  if (command == "evaluate") return run_evaluate(args);
  if (command == "verify-theorem") return run_verify(args);
  if (command == "plot") return run_plot(args);
  std::cerr << "dagmarl: unknown command '" << command << "'\n\n" << kUsage;
  return 2;
}
