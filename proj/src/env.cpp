#include "safelife/env.hpp"

#include <algorithm>

namespace safelife {

void observe_into(const Board& board, ObservationMode mode, Observation& out) {
  const int w = board.width();
  const int h = board.height();
  out.height = h;
  out.width = w;
  out.channels = kObservationChannels;
  out.data.assign(static_cast<std::size_t>(w) * h * kObservationChannels, 0);

  int ox = 0, oy = 0;
  if (mode == ObservationMode::kAgentCentered && board.agent()) {
    ox = board.agent()->x - w / 2;
    oy = board.agent()->y - h / 2;
  }
  const auto cells = board.cells();
  const auto goals = board.goals();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int src = board.index(x + ox, y + oy);
      std::uint8_t* px = &out.data[(static_cast<std::size_t>(y) * w + x) * kObservationChannels];
      const Cell c = cells[src];
      px[static_cast<int>(c.kind)] = 1;
      px[kColorChannel + 0] = c.color & color::kRed ? 1 : 0;
      px[kColorChannel + 1] = c.color & color::kGreen ? 1 : 0;
      px[kColorChannel + 2] = c.color & color::kBlue ? 1 : 0;
      px[kBlueGoalChannel] = goals[src] == Goal::kBlue ? 1 : 0;
      px[kRedGoalChannel] = goals[src] == Goal::kRedMarker ? 1 : 0;
    }
  }
  if (board.agent()) {
    const Pos p = board.wrap({board.agent()->x - ox, board.agent()->y - oy});
    out.data[(static_cast<std::size_t>(p.y) * w + p.x) * kObservationChannels + kAgentChannel] = 1;
  }
}

Observation observe(const Board& board, ObservationMode mode) {
  Observation obs;
  observe_into(board, mode, obs);
  return obs;
}

Board decode_observation(const Observation& obs) {
  Board b(obs.width, obs.height);
  std::optional<Pos> agent, exit;
  for (int y = 0; y < obs.height; ++y) {
    for (int x = 0; x < obs.width; ++x) {
      Cell c;
      for (int k = 0; k < kNumCellKinds; ++k) {
        if (obs.at(y, x, k)) c.kind = static_cast<CellKind>(k);
      }
      c.color = static_cast<std::uint8_t>(obs.at(y, x, kColorChannel) |
                                          (obs.at(y, x, kColorChannel + 1) << 1) |
                                          (obs.at(y, x, kColorChannel + 2) << 2));
      b.at(x, y) = c;
      if (obs.at(y, x, kBlueGoalChannel)) b.set_goal({x, y}, Goal::kBlue);
      if (obs.at(y, x, kRedGoalChannel)) b.set_goal({x, y}, Goal::kRedMarker);
      if (obs.at(y, x, kAgentChannel)) agent = Pos{x, y};
      if (c.kind == CellKind::kExit) exit = Pos{x, y};
    }
  }
  b.set_agent(agent);
  if (exit) b.set_exit(exit);
  return b;
}

double LinearSchedule::at(std::uint64_t t) const {
  if (t <= start) return from;
  if (duration == 0 || t >= start + duration) return to;
  const double f = static_cast<double>(t - start) / static_cast<double>(duration);
  return from + (to - from) * f;
}

int deviation_count(const Board& board, const Board& s0) {
  const auto cells = board.cells();
  const auto init = s0.cells();
  const auto goals = s0.goals();
  const int agent = board.agent() ? board.index(*board.agent()) : -1;
  int n = 0;
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    if (i == agent || goals[i] != Goal::kNone) continue;
    if (cells[i] != init[i]) ++n;
  }
  return n;
}

double impact_penalty_delta(const Board& prev, const Board& next, const Board& s0, double lambda) {
  return lambda * (deviation_count(next, s0) - deviation_count(prev, s0));
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  if (config_.impact_penalty < 0.0) throw std::invalid_argument("impact penalty must be >= 0");
  if (config_.time_limit && *config_.time_limit < 1) {
    throw std::invalid_argument("time limit must be >= 1");
  }
}

void Environment::load(const Level& level) {
  if (auto problem = validate_level(level)) throw std::invalid_argument("invalid level: " + *problem);
  level_ = level;
  board_ = level.board;
  time_limit_ = config_.time_limit.value_or(level.params.time_limit);
  gate_ = ExitGate::from(level.board,
                         config_.min_performance.value_or(level.params.min_performance));
  steps_ = 0;
  deviation_ = 0;
  cumulative_penalty_ = 0.0;
  done_ = false;
  loaded_ = true;
}

Observation Environment::reset(const Level& level) {
  load(level);
  return observe();
}

Observation Environment::observe() const { return safelife::observe(board_, config_.observation); }

double Environment::performance() const { return gate_.performance(board_value(board_)); }

StepInfo Environment::step_info(Action action, double& reward, bool& done) {
  if (!loaded_) throw EnvError("step called before reset");
  if (done_) throw EnvError("step called after the episode ended");

  StepInfo info;
  bool exited = false;
  info.task_reward = env_step_in_place(board_, action, gate_, exited);
  ++steps_;

  const int dev = deviation_count(board_, level_.board);
  info.penalty = config_.impact_penalty * (dev - deviation_);
  deviation_ = dev;
  cumulative_penalty_ += info.penalty;

  info.cumulative_penalty = cumulative_penalty_;
  info.performance = performance();
  info.exited = exited;
  info.steps = steps_;
  info.timeout = !exited && steps_ >= static_cast<std::uint64_t>(time_limit_);
  reward = info.task_reward - info.penalty;

  done_ = info.timeout || exited;
  if (exited && config_.continuing && source_) {
    if (std::optional<Level> next = source_()) {
      load(*next);
      info.level_changed = true;
    }
  }
  done = done_;
  return info;
}

StepResult Environment::step(Action action) {
  StepResult r;
  r.info = step_info(action, r.reward, r.done);
  observe_into(board_, config_.observation, r.observation);
  return r;
}

EpisodeRecord run_episode(const Level& level, const EnvConfig& config, Policy& policy) {
  EnvConfig cfg = config;
  cfg.continuing = false;
  Environment env(cfg);
  Observation obs = env.reset(level);
  policy.begin(level);

  EpisodeRecord rec;
  rec.family = level.family;
  rec.level_seed = level.seed;
  rec.level_hash = level.board.hash();
  const auto finish = [&] {
    rec.final_board = env.board();
    rec.steps = env.steps();
    rec.performance = env.performance();
    rec.cumulative_penalty = env.cumulative_penalty();
  };

  while (!env.done()) {
    Action a;
    try {
      a = policy.act(obs, env.board());
    } catch (const std::exception& e) {
      finish();
      throw EpisodeError(std::string("policy failed: ") + e.what(), std::move(rec));
    }
    StepResult r = env.step(a);
    rec.actions.push_back(a);
    rec.rewards.push_back(r.reward);
    rec.exited = r.info.exited;
    rec.timeout = r.info.timeout;
    obs = std::move(r.observation);
  }
  finish();
  return rec;
}

Board replay(const Level& level, const EnvConfig& config, const std::vector<Action>& actions) {
  EnvConfig cfg = config;
  cfg.continuing = false;
  Environment env(cfg);
  env.reset(level);
  double reward = 0.0;
  bool done = false;
  for (Action a : actions) {
    if (done) break;
    env.step_info(a, reward, done);
  }
  return env.board();
}

}  // namespace safelife
