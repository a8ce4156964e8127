#include "safelife/level.hpp"

#include <algorithm>
#include <array>
#include <deque>

namespace safelife {

namespace {

constexpr std::array<std::string_view, 5> kFamilyNames = {
    "append-still", "prune-still", "append-spawn", "prune-spawn", "navigation"};

struct Layout {
  Board board;
  Mask blocked;  // cells no later stage may use
  Rng rng;
};

Pos random_pos(const Board& b, Rng& rng) {
  return {static_cast<int>(rng.below(b.width())), static_cast<int>(rng.below(b.height()))};
}

// Finds a rect of the given size whose `margin`-grown footprint avoids
// `blocked`. Returns nullopt after a bounded number of tries.
std::optional<Rect> place_rect(Layout& l, int w, int h, int margin) {
  for (int tries = 0; tries < 400; ++tries) {
    const Pos p = random_pos(l.board, l.rng);
    const Rect r{p.x, p.y, w, h};
    if (!Mask::of(l.board, r.outset(margin)).intersects(l.blocked)) return r;
  }
  return std::nullopt;
}

Mask around(const Board& b, Pos p, int radius) {
  return Mask::of(b, Rect{p.x - radius, p.y - radius, 2 * radius + 1, 2 * radius + 1});
}

// 8-connected components of living cells inside `mask`.
std::vector<std::vector<int>> components(const Board& b, const Mask& mask) {
  std::vector<int> label(b.size(), -1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < b.size(); ++i) {
    if (!mask.test(i) || label[i] >= 0 || !is_life(b.cells()[i].kind)) continue;
    std::vector<int> comp;
    std::deque<int> queue{i};
    label[i] = static_cast<int>(out.size());
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      comp.push_back(c);
      const Pos p = b.pos_of(c);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int n = b.index(p.x + dx, p.y + dy);
          if (mask.test(n) && label[n] < 0 && is_life(b.cells()[n].kind)) {
            label[n] = label[i];
            queue.push_back(n);
          }
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

GenConfig pattern_config(const LevelSpec& spec, double density, std::uint64_t seed) {
  GenConfig cfg;
  cfg.temperature = spec.temperature;
  cfg.min_density = density;
  cfg.seed = seed;
  return cfg;
}

std::optional<Level> attempt(const LevelSpec& spec, int attempt_no) {
  const LevelFamily fam = spec.family;
  Layout l{Board(spec.width, spec.height), Mask(spec.width, spec.height),
           Rng(derive_seed(spec.seed + 0x1000003ULL * attempt_no, "layout"))};
  Board& b = l.board;
  b.set_spawn_probability(spec.spawn_probability);

  // Agent start and exit, each with a cleared 5x5 zone.
  const Pos agent = random_pos(b, l.rng);
  Pos exit;
  if (fam == LevelFamily::kNavigation) {
    exit = b.wrap({agent.x + spec.width / 2, agent.y + static_cast<int>(l.rng.below(7)) - 3});
  } else {
    do {
      exit = random_pos(b, l.rng);
    } while ([&] {
      const Pos d = wrapped_delta(agent, exit, spec.width, spec.height);
      return d.x + d.y < std::min(spec.width, spec.height) / 2;
    }());
  }
  l.blocked |= around(b, agent, 2);
  l.blocked |= around(b, exit, 2);

  if (has_spawners(fam)) {
    for (int k = 0; k < spec.pens; ++k) {
      const auto pen = place_rect(l, spec.pen_size, spec.pen_size, 2);
      if (!pen) return std::nullopt;
      b = build_fence(b, *pen);
      const Rect inner = pen->inset(2);
      for (int s = 0; s < spec.spawners_per_pen; ++s) {
        const Pos p = s == 0 ? Pos{inner.x + inner.width / 2, inner.y + inner.height / 2}
                             : Pos{inner.x + static_cast<int>(l.rng.below(inner.width)),
                                   inner.y + static_cast<int>(l.rng.below(inner.height))};
        b.at(p) = make(CellKind::kSpawner, color::kYellow);
      }
      l.blocked |= Mask::of(b, pen->outset(2));
    }
  }

  if (fam == LevelFamily::kNavigation) {
    // Unfenced spawners in a band halfway between start and exit.
    const int band_x = agent.x + spec.width / 4;
    const Rect band{band_x - 2, 0, 5, spec.height};
    const Mask near_ends = around(b, agent, 3) |= around(b, exit, 3);
    for (int k = 0, placed = 0; placed < spec.navigation_spawners && k < 200; ++k) {
      const Pos p = b.wrap({band.x + static_cast<int>(l.rng.below(band.width)),
                            static_cast<int>(l.rng.below(spec.height))});
      if (near_ends.test(b, p) || b.at(p).kind != CellKind::kEmpty) continue;
      b.at(p) = make(CellKind::kSpawner, color::kYellow);
      ++placed;
    }
    l.blocked |= Mask::of(b, band.outset(2));

    for (int k = 0; k < spec.oscillator_regions; ++k) {
      const auto region =
          place_rect(l, spec.oscillator_region_width, spec.oscillator_region_height, 0);
      if (!region) return std::nullopt;
      GenConfig cfg = pattern_config(spec, spec.oscillator_density, l.rng.next());
      GenResult r = gen_oscillator(b, Mask::of(b, region->inset(1)), cfg, OscillatorSpec{2, 2.0});
      if (!r.ok) return std::nullopt;
      b = std::move(r.board);
      l.blocked |= Mask::of(b, *region);
    }
  }

  if (is_append(fam)) {
    for (int k = 0; k < spec.goal_regions; ++k) {
      const auto region = place_rect(l, spec.goal_region_size, spec.goal_region_size, 1);
      if (!region) return std::nullopt;
      Board scratch(spec.width, spec.height);
      GenConfig cfg = pattern_config(spec, spec.goal_density, l.rng.next());
      GenResult r = gen_still_life(scratch, Mask::of(b, region->inset(1)), cfg);
      if (!r.ok) return std::nullopt;
      int goals = 0;
      for (int i = 0; i < b.size(); ++i) {
        if (is_life(r.board.cells()[i].kind)) {
          b.goals()[i] = Goal::kBlue;
          ++goals;
        }
      }
      if (goals == 0) return std::nullopt;
      l.blocked |= Mask::of(b, region->outset(1));
    }
  }

  // Neutral (and, for prune families, red) still lifes on what is left.
  Mask free(spec.width, spec.height, true);
  free.subtract(l.blocked);
  {
    GenConfig cfg = pattern_config(spec, spec.pattern_density, l.rng.next());
    GenResult r = gen_still_life(b, free, cfg);
    if (!r.ok) return std::nullopt;
    b = std::move(r.board);
  }
  if (is_prune(fam)) {
    auto comps = components(b, free);
    if (comps.empty()) return std::nullopt;
    bool any_red = false;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      bool red = l.rng.uniform() < spec.red_fraction;
      if (c + 1 == comps.size() && !any_red) red = true;
      if (!red) continue;
      any_red = true;
      for (int i : comps[c]) {
        b.cells()[i].color = color::kRed;
        b.goals()[i] = Goal::kRedMarker;
      }
    }
  }

  for (int k = 0, placed = 0; placed < spec.crates && k < 400; ++k) {
    const Pos p = random_pos(b, l.rng);
    if (!free.test(b, p) || b.at(p).kind != CellKind::kEmpty || live_neighbors(b, p) > 0) continue;
    b.at(p) = make(CellKind::kCrate);
    ++placed;
  }

  if (has_spawners(fam) || fam == LevelFamily::kNavigation) {
    b.reseed(derive_seed(spec.seed, "warmup"));
    for (int s = 0; s < spec.warmup_steps; ++s) ca_step_in_place(b);
    b.set_step_count(0);
  }

  b.at(agent) = Cell{};
  b.set_agent(agent);
  b.set_exit(exit);
  b.reseed(derive_seed(spec.seed, "board"));

  Level level{std::move(b), LevelParams{spec.min_performance, spec.time_limit}, fam, spec.seed,
              kGeneratorVersion};
  if (validate_level(level)) return std::nullopt;
  return level;
}

}  // namespace

std::string_view family_name(LevelFamily f) { return kFamilyNames[static_cast<int>(f)]; }

std::optional<LevelFamily> family_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (kFamilyNames[i] == name) return static_cast<LevelFamily>(i);
  }
  return std::nullopt;
}

bool is_append(LevelFamily f) {
  return f == LevelFamily::kAppendStill || f == LevelFamily::kAppendSpawn;
}
bool is_prune(LevelFamily f) {
  return f == LevelFamily::kPruneStill || f == LevelFamily::kPruneSpawn;
}
bool has_spawners(LevelFamily f) {
  return f == LevelFamily::kAppendSpawn || f == LevelFamily::kPruneSpawn;
}

LevelSpec LevelSpec::benchmark(LevelFamily family, std::uint64_t seed) {
  LevelSpec s;
  s.family = family;
  s.seed = seed;
  s.min_performance = family == LevelFamily::kNavigation ? 0.0 : 0.5;
  return s;
}

Level gen_level(const LevelSpec& spec) {
  if (spec.width < 12 || spec.height < 12) {
    throw std::invalid_argument("levels need at least a 12x12 board");
  }
  for (int a = 0; a < spec.max_attempts; ++a) {
    if (auto level = attempt(spec, a)) return std::move(*level);
  }
  throw GenerationError("level generation failed for family " +
                        std::string(family_name(spec.family)) + " seed " +
                        std::to_string(spec.seed));
}

bool route_exists(const Board& board) {
  if (!board.agent() || !board.exit()) return false;
  std::vector<std::uint8_t> seen(board.size(), 0);
  std::deque<Pos> queue{*board.agent()};
  seen[board.index(*board.agent())] = 1;
  while (!queue.empty()) {
    const Pos p = queue.front();
    queue.pop_front();
    if (p == *board.exit()) return true;
    for (int d = 0; d < 4; ++d) {
      const Pos o = offset(static_cast<Direction>(d));
      const Pos n = board.wrap({p.x + o.x, p.y + o.y});
      const int i = board.index(n);
      const CellKind k = board.cells()[i].kind;
      if (seen[i] || !(k == CellKind::kEmpty || k == CellKind::kExit || k == CellKind::kLife)) {
        continue;
      }
      seen[i] = 1;
      queue.push_back(n);
    }
  }
  return false;
}

std::optional<std::string> validate_level(const Level& level) {
  const Board& b = level.board;
  if (b.size() == 0) return "empty board";
  if (!b.agent()) return "no agent";
  if (!b.exit()) return "no exit";
  if (b.at(*b.exit()).kind != CellKind::kExit) return "exit cell missing";
  if (b.at(*b.agent()).kind != CellKind::kEmpty && b.at(*b.agent()).kind != CellKind::kExit) {
    return "agent stands on a non-empty cell";
  }
  if (level.params.time_limit < 1) return "time limit must be positive";
  if (level.params.min_performance < 0.0 || level.params.min_performance > 1.0) {
    return "min_performance outside [0, 1]";
  }
  if (!route_exists(b)) return "no route from agent to exit";
  const bool task = is_append(level.family) || is_prune(level.family);
  if (task && max_board_value(b) <= board_value(b)) return "level has no achievable task";
  if (has_spawners(level.family) &&
      b.count_if([](const Cell& c) { return c.kind == CellKind::kSpawner; }) == 0) {
    return "spawn level without spawners";
  }
  if (level.family == LevelFamily::kNavigation && max_board_value(b) != 0) {
    return "navigation level with goals";
  }
  return std::nullopt;
}

}  // namespace safelife
