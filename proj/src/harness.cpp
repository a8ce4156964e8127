#include "safelife/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "safelife/protocol.hpp"

namespace safelife {

std::unique_ptr<Policy> make_policy(const BenchmarkOptions& opts, std::uint64_t stream) {
  if (opts.policy == "noop") return std::make_unique<NoopPolicy>();
  if (opts.policy == "random") {
    return std::make_unique<RandomPolicy>(splitmix64(opts.policy_seed ^ splitmix64(stream)));
  }
  if (opts.policy == "greedy") return std::make_unique<GreedyPolicy>();
  if (opts.policy == "external") {
    if (opts.agent_command.empty()) throw UsageError("the external policy needs an agent command");
    return std::make_unique<ExternalPolicy>(opts.agent_command);
  }
  throw UsageError("unknown policy: " + opts.policy);
}

BenchmarkReport run_benchmark(const std::vector<Level>& levels, const BenchmarkOptions& opts) {
  if (levels.empty()) throw UsageError("no levels to benchmark");
  if (opts.repeats < 1) throw UsageError("repeats must be at least 1");
  if (opts.samples < 1) throw UsageError("samples must be at least 1");
  if (opts.lambdas.empty()) throw UsageError("at least one lambda is required");
  for (double l : opts.lambdas) {
    if (l < 0.0) throw UsageError("lambda must be non-negative");
  }

  const std::size_t per_lambda = levels.size() * static_cast<std::size_t>(opts.repeats);
  const std::size_t jobs = per_lambda * opts.lambdas.size();
  BenchmarkReport report;
  report.policy = opts.policy;
  report.samples = opts.samples;
  report.rows.resize(jobs);

  // External agents are separate processes that keep state between
  // episodes, so they get one process per worker.
  int workers = opts.workers > 0 ? opts.workers
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), jobs));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    std::unique_ptr<Policy> external;
    try {
      if (opts.policy == "external") external = make_policy(opts, 0);
      for (std::size_t job = next++; job < jobs; job = next++) {
        const std::size_t li = job / per_lambda;
        const std::size_t rest = job % per_lambda;
        const Level& level = levels[rest / opts.repeats];
        const int repeat = static_cast<int>(rest % opts.repeats);

        EnvConfig cfg;
        cfg.impact_penalty = opts.lambdas[li];
        cfg.time_limit = opts.time_limit;
        std::unique_ptr<Policy> own;
        Policy* policy = external.get();
        if (!policy) {
          own = make_policy(opts, level.seed * 1000003ULL + static_cast<std::uint64_t>(repeat));
          policy = own.get();
        }
        const EpisodeRecord rec = run_episode(level, cfg, *policy);
        if (auto* ext = dynamic_cast<ExternalPolicy*>(policy)) ext->finish(rec);

        BenchmarkRow& row = report.rows[job];
        row.family = level.family;
        row.seed = level.seed;
        row.repeat = repeat;
        row.lambda = opts.lambdas[li];
        row.performance = rec.performance;
        row.length = rec.steps;
        row.exited = rec.exited;
        row.side_effects = side_effect_score(level, rec.final_board, opts.samples);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = jobs;
    }
  };

  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return report;
}

PerfResult measure_throughput(const Level& level, std::uint64_t steps, std::uint64_t seed) {
  if (steps == 0) throw UsageError("steps must be positive");
  Environment env;
  env.reset(level);
  Rng rng(seed);
  Observation obs;
  double reward = 0.0;
  bool done = false;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t s = 0; s < steps; ++s) {
    env.step_info(static_cast<Action>(rng.below(kNumActions)), reward, done);
    observe_into(env.board(), ObservationMode::kFull, obs);
    if (done) env.reset(level);
  }
  const auto end = std::chrono::steady_clock::now();
  return {steps, std::chrono::duration<double>(end - start).count()};
}

}  // namespace safelife
