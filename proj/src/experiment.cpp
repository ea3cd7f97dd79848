#include "dagmarl/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "dagmarl/episode_log.hpp"

namespace dagmarl {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

TrainOutputs run_training(const ExperimentConfig& config,
                          const std::function<void(const EpisodeLog&)>& on_episode) {
  config.validate();
  Trainer trainer(config.train, make_environment(config));
  const fs::path out_dir(config.out_dir);
  ensure_dir(out_dir);
  const fs::path ckpt_dir = out_dir / "checkpoints";
  ensure_dir(ckpt_dir);

  open_out(out_dir / "config.ini") << to_ini(config);

  TrainOutputs out;
  out.episodes_csv = (out_dir / "episodes.csv").string();
  out.timing_csv = (out_dir / "timing.csv").string();
  out.checkpoint_dir = ckpt_dir.string();
  std::ofstream csv = open_out(out.episodes_csv);
  std::ofstream timing = open_out(out.timing_csv);
  write_episode_header(csv, trainer.agent_names());
  timing << "episode,wall_seconds\n";

  for (int e = 0; e < config.episodes; ++e) {
    EpisodeLog log = trainer.run_episode();
    write_episode_row(csv, log);
    timing << log.episode << "," << fmt(log.wall_seconds) << "\n";
    csv.flush();
    if (on_episode) on_episode(log);
    out.logs.push_back(std::move(log));
  }
  if (!csv || !timing) fail(ErrorCode::kIoError, "writing episode logs failed");

  trainer.save(out.checkpoint_dir);
  nlohmann::ordered_json manifest;
  manifest["format"] = "dagmarl-checkpoints v1";
  manifest["mode"] = mode_name(config.train.mode);
  manifest["env"] = config.env;
  manifest["env_fingerprint"] = trainer.environment().fingerprint();
  manifest["episodes"] = config.episodes;
  manifest["seed"] = config.train.seed;
  manifest["roles"] = trainer.roles();
  open_out(ckpt_dir / "manifest.json") << manifest.dump(2) << "\n";
  return out;
}

int worker_threads(int requested, int jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("DAGMARL_THREADS")) {
    const int c = std::atoi(cap);
    if (c > 0) n = std::min(n, c);
  }
  return std::max(1, std::min(n, jobs));
}

EvaluationReport evaluate_policies(const Trainer& trainer, const Environment& prototype,
                                   const EvaluationOptions& options) {
  if (options.episodes < 1) fail(ErrorCode::kInvalidArgument, "evaluation needs >= 1 episode");
  EvaluationReport report;
  report.rewards.assign(options.episodes, 0.0);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    std::unique_ptr<Environment> env = prototype.clone();
    for (int e = next++; e < options.episodes && !failed; e = next++) {
      try {
        const auto idx = static_cast<uint64_t>(e);
        report.rewards[e] = trainer
                                .evaluate_episode(*env, derive_seed(options.seed, "eval", idx),
                                                  options.stochastic,
                                                  derive_seed(options.seed, "eval-sample", idx))
                                .team_reward;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int threads = worker_threads(options.threads, options.episodes);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  report.histogram = histogram(report.rewards, options.bins);
  report.summary = summarize(report.rewards);
  return report;
}

EvaluationReport evaluate_run(const std::string& run_dir, EvaluationOptions options) {
  const fs::path dir(run_dir);
  const ExperimentConfig config = load_config((dir / "config.ini").string());
  Trainer trainer(config.train, make_environment(config));

  const fs::path manifest_path = dir / "checkpoints" / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::kIoError, "cannot read '" + manifest_path.string() + "'");
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kCheckpointMismatch, std::string("bad manifest: ") + e.what());
  }
  if (manifest.value("env_fingerprint", uint64_t{0}) != trainer.environment().fingerprint() ||
      manifest.value("mode", std::string()) != mode_name(config.train.mode)) {
    fail(ErrorCode::kCheckpointMismatch, "checkpoints were trained for another environment or mode");
  }
  trainer.load((dir / "checkpoints").string());

  const std::unique_ptr<Environment> prototype = make_environment(config);
  const EvaluationReport report = evaluate_policies(trainer, *prototype, options);

  std::ofstream rewards = open_out(dir / "eval_rewards.csv");
  rewards << "episode,team_reward\n";
  for (size_t e = 0; e < report.rewards.size(); ++e) rewards << e << "," << fmt(report.rewards[e]) << "\n";
  std::ofstream hist = open_out(dir / "histogram.csv");
  hist << "bin,lower,upper,count\n";
  for (int b = 0; b < static_cast<int>(report.histogram.counts.size()); ++b) {
    hist << b << "," << fmt(report.histogram.bin_lower(b)) << "," << fmt(report.histogram.bin_upper(b))
         << "," << report.histogram.counts[b] << "\n";
  }
  nlohmann::ordered_json summary;
  summary["episodes"] = options.episodes;
  summary["stochastic"] = options.stochastic;
  summary["mean"] = report.summary.mean;
  summary["median"] = report.summary.median;
  summary["std"] = report.summary.stddev;
  summary["min"] = report.summary.min;
  summary["max"] = report.summary.max;
  open_out(dir / "summary.json") << summary.dump(2) << "\n";
  return report;
}

}  // namespace dagmarl
