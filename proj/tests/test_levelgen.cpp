#include <gtest/gtest.h>

#include <set>

#include "safelife/engine.hpp"
#include "safelife/level.hpp"
#include "safelife/levelgen.hpp"
#include "support.hpp"

using namespace safelife;
using testing_support::with_life;

TEST(Violations, LoneCellNeedsTwo) {
  const Board b = with_life(7, 7, {{3, 3}});
  EXPECT_EQ(count_violations(b, {3, 3}), 2);
}

TEST(Violations, BlockIsClean) {
  const Board b = with_life(8, 8, {{3, 3}, {4, 3}, {3, 4}, {4, 4}});
  EXPECT_EQ(total_violations(b, Mask(8, 8, true)), 0);
}

TEST(Violations, EmptyCellAboutToBeBorn) {
  const Board b = with_life(7, 7, {{2, 2}, {3, 2}, {4, 2}});
  EXPECT_EQ(count_violations(b, {3, 1}), 1);
  EXPECT_EQ(count_violations(b, {3, 2}), 0);
  EXPECT_EQ(count_violations(b, {2, 2}), 1);
}

TEST(Violations, CrowdedCell) {
  const Board b = with_life(7, 7, {{3, 3}, {2, 2}, {3, 2}, {4, 2}, {2, 3}, {4, 3}});
  EXPECT_EQ(count_violations(b, {3, 3}), 2);
}

TEST(Violations, WallsNeverViolate) {
  Board b = with_life(7, 7, {{2, 2}, {3, 2}, {4, 2}});
  b.at(3, 1) = make(CellKind::kWall);
  EXPECT_EQ(count_violations(b, {3, 1}), 0);
}

TEST(StillLife, ResultIsStableAndConfined) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Board b(20, 20);
    const Rect r{4, 5, 10, 9};
    const Mask m = Mask::of(b, r);
    GenConfig cfg;
    cfg.seed = seed;
    cfg.min_density = 0.15;
    const GenResult res = gen_still_life(b, m, cfg);
    ASSERT_TRUE(res.ok) << "seed " << seed;
    EXPECT_EQ(total_violations(res.board, m), 0);
    EXPECT_TRUE(ca_step(res.board).same_layout(res.board));
    int alive = 0;
    for (int i = 0; i < b.size(); ++i) {
      if (!m.test(i)) {
        ASSERT_EQ(res.board.cells()[i], Cell{});
      }
      alive += res.board.cells()[i].kind == CellKind::kLife;
    }
    EXPECT_GE(alive, static_cast<int>(0.15 * m.count()));
  }
}

TEST(StillLife, DeterministicForSeed) {
  Board b(16, 16);
  const Mask m = Mask::of(b, {2, 2, 10, 10});
  GenConfig cfg;
  cfg.seed = 77;
  cfg.min_density = 0.15;
  const GenResult a = gen_still_life(b, m, cfg);
  const GenResult c = gen_still_life(b, m, cfg);
  EXPECT_EQ(a.ok, c.ok);
  EXPECT_EQ(a.iterations, c.iterations);
  EXPECT_TRUE(a.board.same_layout(c.board));
}

TEST(StillLife, ExhaustedBudgetLeavesMaskEmpty) {
  Board b(16, 16);
  const Mask m = Mask::of(b, {2, 2, 10, 10});
  GenConfig cfg;
  cfg.seed = 3;
  cfg.max_iterations = 1;
  const GenResult res = gen_still_life(b, m, cfg);
  EXPECT_FALSE(res.ok);
  for (int i = 0; i < b.size(); ++i) {
    if (m.test(i)) {
      EXPECT_EQ(res.board.cells()[i], Cell{});
    }
  }
}

TEST(Oscillator, PeriodTwoReturnsAndMoves) {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Board b(16, 16);
    const Mask m = Mask::of(b, {4, 4, 8, 8});
    GenConfig cfg;
    cfg.seed = seed;
    cfg.min_density = 0.12;
    const GenResult res = gen_oscillator(b, m, cfg, OscillatorSpec{2, 2.0});
    if (!res.ok) continue;
    ++ok;
    const Board one = ca_step(res.board);
    EXPECT_FALSE(one.same_layout(res.board));
    EXPECT_TRUE(ca_step(one).same_layout(res.board));
  }
  EXPECT_GE(ok, 5);
}

TEST(Fence, EveryThirdPerimeterCell) {
  const Board b(12, 12);
  const Rect r{2, 3, 6, 5};
  const std::vector<Pos> loop = perimeter(r);
  EXPECT_EQ(loop.size(), 2u * (6 + 5) - 4);
  std::set<Pos> unique(loop.begin(), loop.end());
  EXPECT_EQ(unique.size(), loop.size());
  const Board f = build_fence(b, r);
  int walls = 0;
  for (const Cell& c : f.cells()) walls += c.kind == CellKind::kWall;
  EXPECT_EQ(walls, static_cast<int>((loop.size() + 2) / 3));
  EXPECT_THROW(build_fence(b, {0, 0, 2, 5}), std::invalid_argument);
}

class FamilyTest : public ::testing::TestWithParam<LevelFamily> {};

TEST_P(FamilyTest, GeneratesValidDeterministicLevels) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const LevelSpec spec = LevelSpec::benchmark(GetParam(), seed);
    const Level a = gen_level(spec);
    const Level b = gen_level(spec);
    EXPECT_EQ(a, b);
    EXPECT_EQ(validate_level(a), std::nullopt) << *validate_level(a);
    EXPECT_TRUE(route_exists(a.board));
    EXPECT_EQ(a.family, GetParam());
    EXPECT_EQ(a.board.rng(), Rng(a.board.rng().seed()));
    const bool spawners = a.board.count_if([](const Cell& c) { return c.kind == CellKind::kSpawner; }) > 0;
    EXPECT_EQ(spawners, has_spawners(GetParam()) || GetParam() == LevelFamily::kNavigation);
  }
}

TEST_P(FamilyTest, SeedsDiffer) {
  const Level a = gen_level(LevelSpec::benchmark(GetParam(), 1));
  const Level b = gen_level(LevelSpec::benchmark(GetParam(), 2));
  EXPECT_FALSE(a.board.same_layout(b.board));
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, FamilyTest,
                         ::testing::Values(LevelFamily::kAppendStill, LevelFamily::kPruneStill,
                                           LevelFamily::kAppendSpawn, LevelFamily::kPruneSpawn,
                                           LevelFamily::kNavigation),
                         [](const auto& info) {
                           std::string n(family_name(info.param));
                           for (char& c : n) {
                             if (c == '-') c = '_';
                           }
                           return n;
                         });

TEST(Level, TaskShape) {
  const Level append = gen_level(LevelSpec::benchmark(LevelFamily::kAppendStill, 5));
  EXPECT_GT(max_board_value(append.board), 0);
  const Level prune = gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, 5));
  EXPECT_LT(board_value(prune.board), 0);
  const Level nav = gen_level(LevelSpec::benchmark(LevelFamily::kNavigation, 5));
  EXPECT_EQ(nav.params.min_performance, 0.0);
  EXPECT_EQ(max_board_value(nav.board), 0);
}

TEST(Level, FamilyNames) {
  for (int i = 0; i < 5; ++i) {
    const auto f = static_cast<LevelFamily>(i);
    EXPECT_EQ(family_from_name(family_name(f)), f);
  }
  EXPECT_FALSE(family_from_name("append-everything"));
}

TEST(Level, ValidationCatchesBrokenLevels) {
  Level l = gen_level(LevelSpec::benchmark(LevelFamily::kPruneStill, 9));
  Level no_agent = l;
  no_agent.board.set_agent(std::nullopt);
  EXPECT_TRUE(validate_level(no_agent));
  Level bad_limit = l;
  bad_limit.params.time_limit = 0;
  EXPECT_TRUE(validate_level(bad_limit));
}
