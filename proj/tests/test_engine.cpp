#include <gtest/gtest.h>

#include "oracles/naive_ca.hpp"
#include "safelife/engine.hpp"
#include "safelife/render.hpp"
#include "support.hpp"

using namespace safelife;
using testing_support::random_board;
using testing_support::with_life;

namespace {

int count_kind(const Board& b, CellKind k) {
  int n = 0;
  for (const Cell& c : b.cells()) n += c.kind == k;
  return n;
}

}  // namespace

TEST(Cell, PackRoundTrip) {
  for (int k = 0; k < kNumCellKinds; ++k) {
    for (std::uint8_t c = 0; c < 8; ++c) {
      const Cell cell{static_cast<CellKind>(k), c};
      Cell back;
      ASSERT_TRUE(Cell::unpack(cell.pack(), back));
      EXPECT_EQ(back, cell);
    }
  }
  Cell out;
  EXPECT_FALSE(Cell::unpack(0x08, out));
  EXPECT_FALSE(Cell::unpack(0x81, out));
}

TEST(Board, CoordinatesWrap) {
  Board b(5, 4);
  b.at(-1, -1) = life(color::kRed);
  EXPECT_EQ(b.at(4, 3), life(color::kRed));
  EXPECT_EQ(b.index(7, 9), b.index(2, 1));
  EXPECT_EQ(wrapped_delta({0, 0}, {4, 3}, 5, 4), (Pos{1, 1}));
}

TEST(CaStep, BlinkerFlips) {
  const Board v = with_life(5, 5, {{1, 0}, {1, 1}, {1, 2}});
  const Board h = ca_step(v);
  EXPECT_TRUE(h.same_layout(with_life(5, 5, {{0, 1}, {1, 1}, {2, 1}})));
  EXPECT_TRUE(ca_step(h).same_layout(v));
}

TEST(CaStep, BlockIsStill) {
  const Board b = with_life(6, 6, {{2, 2}, {3, 2}, {2, 3}, {3, 3}});
  EXPECT_TRUE(ca_step(b).same_layout(b));
}

TEST(CaStep, LoneCellDies) {
  const Board b = with_life(5, 5, {{2, 2}});
  EXPECT_EQ(ca_step(b).at(2, 2), Cell{});
}

TEST(CaStep, BirthTakesMajorityColor) {
  Board b(7, 7);
  b.at(2, 2) = life(color::kGreen);
  b.at(3, 2) = life(color::kGreen);
  b.at(4, 2) = life(color::kRed);
  const Board n = ca_step(b);
  EXPECT_EQ(n.at(3, 1), life(color::kGreen));
  EXPECT_EQ(n.at(3, 3), life(color::kGreen));
}

TEST(CaStep, TreesCountButNeverChange) {
  Board b(6, 6);
  b.at(1, 1) = make(CellKind::kTree, color::kGreen);
  b.at(2, 1) = make(CellKind::kTree, color::kGreen);
  b.at(3, 1) = make(CellKind::kTree, color::kGreen);
  const Board n = ca_step(b);
  EXPECT_EQ(count_kind(n, CellKind::kTree), 3);
  EXPECT_EQ(n.at(2, 0).kind, CellKind::kLife);
  EXPECT_EQ(n.at(2, 2).kind, CellKind::kLife);
}

TEST(CaStep, HardLifeObeysLifeRules) {
  Board b(5, 5);
  b.at(2, 2) = make(CellKind::kHardLife);
  EXPECT_EQ(ca_step(b).at(2, 2), Cell{});
}

TEST(CaStep, MatchesNaiveReference) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Board b = random_board(rng, 3 + static_cast<int>(rng.below(12)), 3 + static_cast<int>(rng.below(12)));
    for (int s = 0; s < 10; ++s) {
      const Board expect = oracle::naive_step(b);
      b = ca_step(b);
      ASSERT_TRUE(b.same_layout(expect)) << "trial " << trial << " step " << s;
      ASSERT_EQ(b.step_count(), expect.step_count());
    }
  }
}

TEST(CaStep, StepCountAdvancesByOne) {
  Board b(4, 4);
  b.set_step_count(41);
  EXPECT_EQ(ca_step(b).step_count(), 42u);
}

TEST(CaStep, AgentNeighborhoodIsFrozen) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Board b = random_board(rng, 10, 10, true);
    const Pos a{static_cast<int>(rng.below(10)), static_cast<int>(rng.below(10))};
    b.at(a) = Cell{};
    b.set_agent(a);
    const Board n = ca_step(b);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        ASSERT_EQ(n.at(a.x + dx, a.y + dy), b.at(a.x + dx, a.y + dy));
      }
    }
  }
}

TEST(CaStep, TranslationCommutes) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Board b = random_board(rng, 9, 7);
    const Pos a{static_cast<int>(rng.below(9)), static_cast<int>(rng.below(7))};
    b.at(a) = Cell{};
    b.set_agent(a);
    const int dx = static_cast<int>(rng.below(9));
    const int dy = static_cast<int>(rng.below(7));
    ASSERT_TRUE(ca_step(translated(b, dx, dy)).same_layout(translated(ca_step(b), dx, dy)));
  }
}

TEST(CaStep, ZeroProbabilitySpawnerIsInert) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Board with_spawners = random_board(rng, 10, 10, true);
    with_spawners.set_spawn_probability(0.0);
    Board as_walls = with_spawners;
    for (Cell& c : as_walls.cells()) {
      if (c.kind == CellKind::kSpawner) c = make(CellKind::kWall, c.color);
    }
    for (int s = 0; s < 5; ++s) {
      with_spawners = ca_step(with_spawners);
      as_walls = ca_step(as_walls);
    }
    for (int i = 0; i < with_spawners.size(); ++i) {
      Cell c = with_spawners.cells()[i];
      if (c.kind == CellKind::kSpawner) c.kind = CellKind::kWall;
      ASSERT_EQ(c, as_walls.cells()[i]);
    }
  }
}

TEST(CaStep, SpawnerBirthsAreYellowAndReproducible) {
  Board b(9, 9, 99);
  b.at(4, 4) = make(CellKind::kSpawner, color::kYellow);
  b.set_spawn_probability(1.0);
  const Board n = ca_step(b);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx || dy) {
        EXPECT_EQ(n.at(4 + dx, 4 + dy), life(color::kYellow));
      }
    }
  }
  b.set_spawn_probability(0.3);
  EXPECT_EQ(ca_step(b), ca_step(b));
}

TEST(ApplyAction, MovesIntoEmpty) {
  Board b(6, 6);
  b.set_agent(Pos{2, 2});
  EXPECT_EQ(apply_action(b, Action::kMoveEast).agent(), (Pos{3, 2}));
  EXPECT_EQ(apply_action(b, Action::kMoveNorth).agent(), (Pos{2, 1}));
}

TEST(ApplyAction, PushesCrate) {
  Board b(6, 6);
  b.set_agent(Pos{2, 2});
  b.at(3, 2) = make(CellKind::kCrate);
  const Board n = apply_action(b, Action::kMoveEast);
  EXPECT_EQ(n.agent(), (Pos{3, 2}));
  EXPECT_EQ(n.at(4, 2).kind, CellKind::kCrate);
  EXPECT_EQ(n.at(3, 2), Cell{});

  b.at(4, 2) = make(CellKind::kWall);
  EXPECT_EQ(apply_action(b, Action::kMoveEast), b);
}

TEST(ApplyAction, ToggleRules) {
  Board b(6, 6);
  b.set_agent(Pos{2, 2});
  EXPECT_EQ(apply_action(b, Action::kToggleNorth).at(2, 1), life(color::kNone));
  b.at(2, 1) = life(color::kRed);
  EXPECT_EQ(apply_action(b, Action::kToggleNorth).at(2, 1), Cell{});
  for (CellKind k : {CellKind::kHardLife, CellKind::kWall, CellKind::kTree, CellKind::kSpawner,
                     CellKind::kCrate}) {
    b.at(2, 1) = make(k);
    EXPECT_EQ(apply_action(b, Action::kToggleNorth), b) << kind_name(k);
  }
}

TEST(ApplyAction, BlockedMoveIsNoop) {
  Board b(6, 6);
  b.set_agent(Pos{2, 2});
  b.at(2, 3) = make(CellKind::kWall);
  EXPECT_EQ(apply_action(b, Action::kMoveSouth), b);
}

TEST(ApplyAction, CratesAreConserved) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Board b = random_board(rng, 8, 8);
    b.at(0, 0) = Cell{};
    b.set_agent(Pos{0, 0});
    const int crates = count_kind(b, CellKind::kCrate);
    for (int s = 0; s < 40; ++s) {
      apply_action_in_place(b, static_cast<Action>(rng.below(kNumActions)));
      ca_step_in_place(b);
      ASSERT_EQ(count_kind(b, CellKind::kCrate), crates);
    }
  }
}

TEST(Actions, NamesRoundTrip) {
  for (int i = 0; i < kNumActions; ++i) {
    const Action a = static_cast<Action>(i);
    EXPECT_EQ(action_from_name(action_name(a)), a);
    EXPECT_EQ(action_from_index(i), a);
  }
  EXPECT_FALSE(action_from_index(9));
  EXPECT_FALSE(action_from_name("jump"));
}

TEST(Scoring, BoardValue) {
  Board b(8, 8);
  for (int x = 0; x < 4; ++x) b.set_goal({x, 0}, Goal::kBlue);
  EXPECT_EQ(board_value(b), 0);
  EXPECT_EQ(max_board_value(b), 12);
  b.at(0, 0) = life(color::kNone);
  b.at(1, 0) = life(color::kGreen);
  b.at(0, 5) = life(color::kRed);
  b.at(2, 5) = life(color::kRed);
  b.at(4, 5) = life(color::kRed | color::kBlue);
  EXPECT_EQ(board_value(b), 3);
  b.at(6, 6) = life(color::kYellow);
  EXPECT_EQ(board_value(b), 3);
}

TEST(Scoring, PerformanceFraction) {
  Board initial(8, 8);
  for (int x = 0; x < 4; ++x) initial.set_goal({x, 0}, Goal::kBlue);
  initial.at(0, 4) = life(color::kRed);
  initial.at(3, 4) = life(color::kRed);
  EXPECT_EQ(board_value(initial), -2);
  EXPECT_DOUBLE_EQ(performance_fraction(initial, initial), 0.0);

  Board now = initial;
  now.at(0, 4) = Cell{};
  now.at(3, 4) = Cell{};
  now.at(0, 0) = life(color::kNone);
  now.at(1, 0) = life(color::kNone);
  EXPECT_DOUBLE_EQ(performance_fraction(now, initial), 8.0 / 14.0);

  now.at(0, 0) = Cell{};
  now.at(6, 6) = life(color::kRed);
  EXPECT_DOUBLE_EQ(performance_fraction(now, initial), (2.0 + 2.0) / 14.0);

  Board no_task(4, 4);
  EXPECT_DOUBLE_EQ(performance_fraction(no_task, no_task), 1.0);
}

TEST(EnvStep, ToggleRedGivesPoint) {
  Board b(8, 8);
  b.set_agent(Pos{2, 2});
  b.set_exit(Pos{6, 6});
  b.at(2, 1) = life(color::kRed);
  const ExitGate gate = ExitGate::from(b, 0.5);
  const StepOutcome out = env_step(b, Action::kToggleNorth, gate);
  EXPECT_EQ(out.reward, 1);
  EXPECT_FALSE(out.exited);
}

TEST(EnvStep, ExitOpensAtGate) {
  Board b(8, 8);
  b.set_goal({0, 7}, Goal::kBlue);
  b.set_goal({1, 7}, Goal::kBlue);
  b.set_agent(Pos{4, 4});
  b.set_exit(Pos{5, 4});
  const ExitGate gate = ExitGate::from(b, 0.5);
  const StepOutcome closed = env_step(b, Action::kMoveEast, gate);
  EXPECT_FALSE(closed.exited);
  EXPECT_EQ(closed.board.agent(), (Pos{5, 4}));

  const ExitGate open_gate = ExitGate::from(b, 0.0);
  const StepOutcome open = env_step(b, Action::kMoveEast, open_gate);
  EXPECT_TRUE(open.exited);
  EXPECT_EQ(open.reward, 1);
}

TEST(EnvStep, RewardsTelescope) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    Board b = random_board(rng, 10, 10, true);
    for (int i = 0; i < b.size(); ++i) {
      if (rng.bernoulli(0.2)) b.goals()[i] = Goal::kBlue;
    }
    b.at(1, 1) = Cell{};
    b.set_agent(Pos{1, 1});
    const Board start = b;
    const ExitGate gate = ExitGate::from(start, 1.0);
    long total = 0;
    for (int s = 0; s < 60; ++s) {
      bool exited = false;
      total += env_step_in_place(b, static_cast<Action>(rng.below(kNumActions)), gate, exited);
    }
    ASSERT_EQ(total, board_value(b) - board_value(start));
  }
}

TEST(Render, ShowsAgentAndPatterns) {
  Board b = with_life(4, 3, {{1, 1}});
  b.set_agent(Pos{0, 0});
  const std::string s = render_ascii(b);
  EXPECT_EQ(s.size(), 3u * 5u);
  EXPECT_EQ(s[0], '@');
  EXPECT_NE(s[5 + 1], '.');
}
