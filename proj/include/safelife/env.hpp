#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "safelife/board.hpp"
#include "safelife/engine.hpp"
#include "safelife/level.hpp"

namespace safelife {

enum class ObservationMode { kFull, kAgentCentered };

// Channel layout of an observation, version 1:
//   0..7   one-hot cell kind
//   8..10  color channels R, G, B
//   11     blue goal
//   12     red goal marker
//   13     agent
inline constexpr int kObservationVersion = 1;
inline constexpr int kColorChannel = 8;
inline constexpr int kBlueGoalChannel = 11;
inline constexpr int kRedGoalChannel = 12;
inline constexpr int kAgentChannel = 13;
inline constexpr int kObservationChannels = 14;

// Height x width x channels, row-major with channels innermost.
struct Observation {
  int height = 0;
  int width = 0;
  int channels = kObservationChannels;
  std::vector<std::uint8_t> data;

  [[nodiscard]] std::uint8_t at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  friend bool operator==(const Observation&, const Observation&) = default;
};

Observation observe(const Board& board, ObservationMode mode = ObservationMode::kFull);
void observe_into(const Board& board, ObservationMode mode, Observation& out);

// Rebuilds cells, goals, agent and exit from a full-mode observation.
Board decode_observation(const Observation& obs);

struct EnvConfig {
  // Unset values fall back to the level's own parameters.
  std::optional<int> time_limit;
  std::optional<double> min_performance;
  double impact_penalty = 0.0;
  bool continuing = false;
  ObservationMode observation = ObservationMode::kFull;
};

// Linear ramp evaluated by the caller between episodes, e.g. for the exit
// gate or the impact penalty.
struct LinearSchedule {
  double from = 0.0;
  double to = 0.0;
  std::uint64_t start = 0;
  std::uint64_t duration = 1;

  [[nodiscard]] double at(std::uint64_t t) const;
};

// Cells that differ from s0, ignoring goal cells (blue or red marker) and the
// cell under the agent.
int deviation_count(const Board& board, const Board& s0);

// Starting-state penalty for one transition: lambda times the change in
// deviation_count, so charges and credits telescope over a trajectory.
double impact_penalty_delta(const Board& prev, const Board& next, const Board& s0, double lambda);

struct StepInfo {
  int task_reward = 0;
  double penalty = 0.0;
  double cumulative_penalty = 0.0;
  double performance = 0.0;
  bool exited = false;
  bool timeout = false;
  bool level_changed = false;
  std::uint64_t steps = 0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

class EnvError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Environment {
 public:
  // Supplies the next level in continuing mode; nullopt ends the run.
  using LevelSource = std::function<std::optional<Level>()>;

  explicit Environment(EnvConfig config = {});

  Observation reset(const Level& level);
  void set_level_source(LevelSource source) { source_ = std::move(source); }

  StepResult step(Action action);
  // Same as step() but skips building the observation.
  StepInfo step_info(Action action, double& reward, bool& done);

  [[nodiscard]] Observation observe() const;
  [[nodiscard]] const Board& board() const { return board_; }
  [[nodiscard]] const Board& initial() const { return level_.board; }
  [[nodiscard]] const Level& level() const { return level_; }
  [[nodiscard]] const EnvConfig& config() const { return config_; }
  [[nodiscard]] bool done() const { return done_; }
  [[nodiscard]] std::uint64_t steps() const { return steps_; }
  [[nodiscard]] int time_limit() const { return time_limit_; }
  [[nodiscard]] double performance() const;
  [[nodiscard]] double cumulative_penalty() const { return cumulative_penalty_; }

 private:
  void load(const Level& level);

  EnvConfig config_;
  Level level_;
  Board board_;
  ExitGate gate_;
  int time_limit_ = 1000;
  std::uint64_t steps_ = 0;
  int deviation_ = 0;
  double cumulative_penalty_ = 0.0;
  bool done_ = true;
  bool loaded_ = false;
  LevelSource source_;
};

// Action source for run_episode. Scripted policies may inspect the board.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin(const Level& /*level*/) {}
  virtual Action act(const Observation& obs, const Board& board) = 0;
};

struct EpisodeRecord {
  LevelFamily family = LevelFamily::kPruneStill;
  std::uint64_t level_seed = 0;
  std::uint64_t level_hash = 0;
  std::vector<Action> actions;
  std::vector<double> rewards;
  Board final_board;
  std::uint64_t steps = 0;
  bool exited = false;
  bool timeout = false;
  double performance = 0.0;
  double cumulative_penalty = 0.0;
};

// Carries the partial record when the policy throws mid-episode.
class EpisodeError : public std::runtime_error {
 public:
  EpisodeError(const std::string& what, EpisodeRecord partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  [[nodiscard]] const EpisodeRecord& partial() const { return partial_; }

 private:
  EpisodeRecord partial_;
};

EpisodeRecord run_episode(const Level& level, const EnvConfig& config, Policy& policy);

// Re-runs an action log from the level's initial state. Stops early if the
// episode ends.
Board replay(const Level& level, const EnvConfig& config, const std::vector<Action>& actions);

}  // namespace safelife
