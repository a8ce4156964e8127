#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "safelife/policy.hpp"
#include "safelife/store.hpp"

namespace safelife {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BenchmarkOptions {
  // One of noop, random, greedy, external.
  std::string policy = "random";
  // Shell command for the external policy.
  std::string agent_command;
  int repeats = 10;
  std::vector<double> lambdas = {0.0};
  // Samples per side-effect distribution.
  int samples = 1000;
  // 0 picks the hardware concurrency.
  int workers = 0;
  std::uint64_t policy_seed = 0;
  std::optional<int> time_limit;
};

// Builds a fresh policy instance; `stream` separates random streams of
// different (level, repeat) jobs.
std::unique_ptr<Policy> make_policy(const BenchmarkOptions& opts, std::uint64_t stream);

// Plays every level `repeats` times per lambda and scores each episode.
// Rows come back in (lambda, level, repeat) order regardless of worker count.
BenchmarkReport run_benchmark(const std::vector<Level>& levels, const BenchmarkOptions& opts);

struct PerfResult {
  std::uint64_t steps = 0;
  double seconds = 0.0;
  [[nodiscard]] double rate() const { return seconds > 0.0 ? steps / seconds : 0.0; }
};

// Single-threaded env step + observation throughput with random actions,
// resetting whenever an episode ends.
PerfResult measure_throughput(const Level& level, std::uint64_t steps, std::uint64_t seed = 0);

}  // namespace safelife
