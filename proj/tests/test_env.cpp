#include <gtest/gtest.h>

#include "safelife/env.hpp"
#include "safelife/policy.hpp"
#include "support.hpp"

using namespace safelife;

namespace {

// Agent at (2, 2), exit at (8, 2), a red block at (4..5, 6..7).
Level tiny_level() {
  Board b(12, 10, 7);
  b.set_agent(Pos{2, 2});
  b.set_exit(Pos{8, 2});
  for (Pos p : {Pos{4, 6}, Pos{5, 6}, Pos{4, 7}, Pos{5, 7}}) {
    b.at(p) = life(color::kRed);
    b.set_goal(p, Goal::kRedMarker);
  }
  Level l;
  l.board = b;
  l.family = LevelFamily::kPruneStill;
  l.seed = 1;
  return l;
}

class ScriptPolicy : public Policy {
 public:
  explicit ScriptPolicy(std::vector<Action> script) : script_(std::move(script)) {}
  Action act(const Observation&, const Board&) override {
    return i_ < script_.size() ? script_[i_++] : Action::kNoop;
  }

 private:
  std::vector<Action> script_;
  std::size_t i_ = 0;
};

}  // namespace

TEST(Observation, FullModeRoundTrips) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kAppendSpawn, 2));
  const Observation obs = observe(l.board);
  EXPECT_EQ(obs.height, 26);
  EXPECT_EQ(obs.width, 26);
  EXPECT_EQ(obs.data.size(), 26u * 26u * kObservationChannels);
  EXPECT_TRUE(decode_observation(obs).same_layout(l.board));
}

TEST(Observation, OneKindPerCell) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneSpawn, 2));
  const Observation obs = observe(l.board);
  for (int y = 0; y < obs.height; ++y) {
    for (int x = 0; x < obs.width; ++x) {
      int kinds = 0;
      for (int k = 0; k < kNumCellKinds; ++k) kinds += obs.at(y, x, k);
      ASSERT_EQ(kinds, 1);
    }
  }
}

TEST(Observation, AgentCenteredPutsAgentInMiddle) {
  const Level l = tiny_level();
  const Observation obs = observe(l.board, ObservationMode::kAgentCentered);
  EXPECT_EQ(obs.at(5, 6, kAgentChannel), 1);
  // Block corner sits two columns east and four rows south of the agent.
  EXPECT_EQ(obs.at(9, 8, static_cast<int>(CellKind::kLife)), 1);
  EXPECT_EQ(obs.at(9, 8, kColorChannel), 1);
  EXPECT_EQ(obs.at(9, 8, kRedGoalChannel), 1);
}

TEST(Environment, ResetIsDeterministic) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneSpawn, 6));
  Environment a, b;
  EXPECT_EQ(a.reset(l), b.reset(l));
  Rng rng(1);
  for (int s = 0; s < 200; ++s) {
    const Action act = static_cast<Action>(rng.below(kNumActions));
    const StepResult ra = a.step(act);
    const StepResult rb = b.step(act);
    ASSERT_EQ(ra.observation, rb.observation);
    ASSERT_EQ(ra.reward, rb.reward);
  }
  EXPECT_EQ(a.board(), b.board());
}

TEST(Environment, StepBeforeResetThrows) {
  Environment env;
  EXPECT_THROW(env.step(Action::kNoop), EnvError);
}

TEST(Environment, TimesOutAtLimit) {
  const Level l = tiny_level();
  Environment env;
  env.reset(l);
  StepResult r;
  for (int s = 0; s < 1000; ++s) {
    ASSERT_FALSE(env.done());
    r = env.step(Action::kNoop);
  }
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.info.timeout);
  EXPECT_EQ(r.info.steps, 1000u);
  EXPECT_THROW(env.step(Action::kNoop), EnvError);
}

TEST(Environment, ConfigOverridesTimeLimit) {
  EnvConfig cfg;
  cfg.time_limit = 5;
  Environment env(cfg);
  env.reset(tiny_level());
  for (int s = 0; s < 4; ++s) EXPECT_FALSE(env.step(Action::kNoop).done);
  EXPECT_TRUE(env.step(Action::kNoop).done);
}

TEST(Environment, ExitClosedUntilTaskDone) {
  const Level l = tiny_level();
  ScriptPolicy straight(std::vector<Action>(6, Action::kMoveEast));
  EnvConfig cfg;
  cfg.time_limit = 10;
  EpisodeRecord rec = run_episode(l, cfg, straight);
  EXPECT_FALSE(rec.exited);
  EXPECT_TRUE(rec.timeout);

  // Clear the west half of the block from beside it; the rest starves.
  std::vector<Action> script(4, Action::kMoveSouth);
  script.insert(script.end(), {Action::kMoveEast, Action::kToggleEast, Action::kMoveSouth,
                               Action::kToggleEast});
  script.insert(script.end(), 5, Action::kMoveNorth);
  script.insert(script.end(), 5, Action::kMoveEast);
  ScriptPolicy solve(script);
  rec = run_episode(l, EnvConfig{}, solve);
  EXPECT_TRUE(rec.exited);
  EXPECT_EQ(rec.steps, script.size());
  EXPECT_DOUBLE_EQ(rec.performance, 1.0);
  double total = 0.0;
  for (double r : rec.rewards) total += r;
  EXPECT_DOUBLE_EQ(total, 5.0);
  EXPECT_DOUBLE_EQ(rec.rewards.back(), 1.0);
}

TEST(ImpactPenalty, ChargesAndCredits) {
  const Level l = tiny_level();
  EnvConfig cfg;
  cfg.impact_penalty = 0.5;
  Environment env(cfg);
  env.reset(l);
  // Creating a cell away from goals is charged...
  StepResult r = env.step(Action::kToggleWest);
  EXPECT_DOUBLE_EQ(r.info.penalty, 0.5);
  EXPECT_DOUBLE_EQ(r.reward, -0.5);
  // ...and removing it again is credited.
  r = env.step(Action::kToggleWest);
  EXPECT_DOUBLE_EQ(r.info.penalty, -0.5);
  EXPECT_DOUBLE_EQ(r.info.cumulative_penalty, 0.0);
}

TEST(ImpactPenalty, GoalCellsAreExempt) {
  const Level l = tiny_level();
  EnvConfig cfg;
  cfg.impact_penalty = 1.0;
  Environment env(cfg);
  env.reset(l);
  for (int s = 0; s < 4; ++s) env.step(Action::kMoveSouth);
  env.step(Action::kMoveEast);
  const StepResult r = env.step(Action::kToggleEast);
  EXPECT_EQ(r.info.task_reward, 1);
  EXPECT_DOUBLE_EQ(r.info.penalty, 0.0);
}

TEST(ImpactPenalty, TelescopesOverRandomTrajectories) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Level l = gen_level(LevelSpec::benchmark(static_cast<LevelFamily>(trial % 5), trial));
    EnvConfig cfg;
    cfg.impact_penalty = 0.25 + rng.uniform();
    Environment env(cfg);
    env.reset(l);
    double sum = 0.0;
    while (!env.done()) sum += env.step(static_cast<Action>(rng.below(kNumActions))).info.penalty;
    EXPECT_NEAR(sum, cfg.impact_penalty * deviation_count(env.board(), l.board), 1e-9);
  }
}

TEST(ImpactPenalty, ZeroLambdaLeavesRewardsAlone) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kAppendStill, 3));
  Environment env;
  env.reset(l);
  Board shadow = l.board;
  const ExitGate gate = ExitGate::from(l.board, l.params.min_performance);
  Rng rng(4);
  while (!env.done()) {
    const Action a = static_cast<Action>(rng.below(kNumActions));
    bool exited = false;
    const int expect = env_step_in_place(shadow, a, gate, exited);
    ASSERT_EQ(env.step(a).reward, static_cast<double>(expect));
  }
}

TEST(Environment, ContinuingModeChainsLevels) {
  EnvConfig cfg;
  cfg.continuing = true;
  cfg.min_performance = 0.0;
  Environment env(cfg);
  Level first = tiny_level();
  Level second = tiny_level();
  second.seed = 2;
  int served = 0;
  env.set_level_source([&]() -> std::optional<Level> {
    if (served++ == 0) return second;
    return std::nullopt;
  });
  env.reset(first);
  StepResult r;
  for (int s = 0; s < 6; ++s) r = env.step(Action::kMoveEast);
  EXPECT_TRUE(r.info.exited);
  EXPECT_TRUE(r.info.level_changed);
  EXPECT_FALSE(r.done);
  EXPECT_EQ(env.level().seed, 2u);
  EXPECT_EQ(env.steps(), 0u);
  EXPECT_EQ(env.board().agent(), (Pos{2, 2}));
  for (int s = 0; s < 6; ++s) r = env.step(Action::kMoveEast);
  EXPECT_TRUE(r.done);
  EXPECT_FALSE(r.info.level_changed);
}

TEST(Replay, ReproducesEpisode) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneSpawn, 8));
  RandomPolicy p(3);
  const EpisodeRecord rec = run_episode(l, EnvConfig{}, p);
  EXPECT_EQ(replay(l, EnvConfig{}, rec.actions), rec.final_board);
  EXPECT_EQ(replay(l, EnvConfig{}, rec.actions).hash(), rec.final_board.hash());
}

TEST(Schedule, Ramps) {
  const LinearSchedule s{0.0, 0.5, 100, 100};
  EXPECT_DOUBLE_EQ(s.at(0), 0.0);
  EXPECT_DOUBLE_EQ(s.at(150), 0.25);
  EXPECT_DOUBLE_EQ(s.at(1000), 0.5);
}

TEST(Policies, GreedyClearsPruneLevel) {
  const Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, 12));
  GreedyPolicy g;
  const EpisodeRecord rec = run_episode(l, EnvConfig{}, g);
  EXPECT_GE(rec.performance, 0.5);
}
