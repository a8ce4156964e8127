#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "safelife/board.hpp"
#include "safelife/engine.hpp"
#include "safelife/levelgen.hpp"

namespace safelife {

// Bumped whenever the layout algorithm changes its output for a given seed.
inline constexpr std::uint32_t kGeneratorVersion = 1;

enum class LevelFamily : std::uint8_t {
  kAppendStill = 0,
  kPruneStill = 1,
  kAppendSpawn = 2,
  kPruneSpawn = 3,
  kNavigation = 4,
};

std::string_view family_name(LevelFamily f);
std::optional<LevelFamily> family_from_name(std::string_view name);
bool is_append(LevelFamily f);
bool is_prune(LevelFamily f);
bool has_spawners(LevelFamily f);

struct Level {
  Board board;
  LevelParams params;
  LevelFamily family = LevelFamily::kPruneStill;
  std::uint64_t seed = 0;
  std::uint32_t generator_version = kGeneratorVersion;

  friend bool operator==(const Level&, const Level&) = default;
};

struct LevelSpec {
  LevelFamily family = LevelFamily::kPruneStill;
  int width = 26;
  int height = 26;
  std::uint64_t seed = 0;
  double min_performance = 0.5;
  int time_limit = 1000;
  double spawn_probability = kDefaultSpawnProbability;

  // Pattern synthesis.
  double temperature = 0.4;
  double pattern_density = 0.15;
  // Share of pattern components painted red in prune families.
  double red_fraction = 0.5;

  // Append families: square goal regions filled with a still-life target.
  int goal_regions = 1;
  int goal_region_size = 9;
  double goal_density = 0.2;

  // Spawn families: fenced pens, each holding `spawners_per_pen` spawners.
  int pens = 1;
  int pen_size = 11;
  int spawners_per_pen = 1;

  // Navigation: period-2 green regions and an unfenced spawner band.
  int oscillator_regions = 2;
  int oscillator_region_width = 8;
  int oscillator_region_height = 10;
  double oscillator_density = 0.12;
  int navigation_spawners = 3;

  int crates = 0;
  // Steps simulated before play so spawner regions start populated.
  int warmup_steps = 50;
  int max_attempts = 12;

  // Defaults used for the frozen benchmark suites.
  static LevelSpec benchmark(LevelFamily family, std::uint64_t seed);
};

// Same LevelSpec, same level (the seed is part of it). Throws GenerationError naming
// the seed when no valid level is found within max_attempts.
Level gen_level(const LevelSpec& spec);

// Structural checks shared by the generator, loaders and the play service.
// Returns a description of the first problem found.
std::optional<std::string> validate_level(const Level& level);

// True if the agent can reach the exit moving through empty cells, the
// exit, or removable life.
bool route_exists(const Board& board);

}  // namespace safelife
