#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "safelife/cell.hpp"
#include "safelife/rng.hpp"

namespace safelife {

struct Pos {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(const Pos&, const Pos&) = default;
  friend constexpr auto operator<=>(const Pos&, const Pos&) = default;
};

enum class Direction : std::uint8_t { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

constexpr Pos offset(Direction d) {
  switch (d) {
    case Direction::kNorth: return {0, -1};
    case Direction::kEast: return {1, 0};
    case Direction::kSouth: return {0, 1};
    case Direction::kWest: return {-1, 0};
  }
  return {0, 0};
}

inline constexpr double kDefaultSpawnProbability = 0.3;

// Toroidal grid. Coordinates are (x, y) with y growing southward; every
// accessor wraps, so callers may pass out-of-range coordinates freely.
class Board {
 public:
  Board() = default;
  Board(int width, int height, std::uint64_t rng_seed = 0);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int size() const { return width_ * height_; }

  [[nodiscard]] int index(int x, int y) const { return wrap_y(y) * width_ + wrap_x(x); }
  [[nodiscard]] int index(Pos p) const { return index(p.x, p.y); }
  [[nodiscard]] Pos pos_of(int idx) const { return {idx % width_, idx / width_}; }
  [[nodiscard]] Pos wrap(Pos p) const { return {wrap_x(p.x), wrap_y(p.y)}; }

  [[nodiscard]] const Cell& at(int x, int y) const { return cells_[index(x, y)]; }
  [[nodiscard]] const Cell& at(Pos p) const { return cells_[index(p)]; }
  Cell& at(int x, int y) { return cells_[index(x, y)]; }
  Cell& at(Pos p) { return cells_[index(p)]; }
  void set(Pos p, Cell c) { cells_[index(p)] = c; }

  [[nodiscard]] Goal goal(Pos p) const { return goals_[index(p)]; }
  void set_goal(Pos p, Goal g) { goals_[index(p)] = g; }

  [[nodiscard]] std::span<const Cell> cells() const { return cells_; }
  [[nodiscard]] std::span<Cell> cells() { return cells_; }
  [[nodiscard]] std::span<const Goal> goals() const { return goals_; }
  [[nodiscard]] std::span<Goal> goals() { return goals_; }

  [[nodiscard]] const std::optional<Pos>& agent() const { return agent_; }
  void set_agent(std::optional<Pos> p);
  [[nodiscard]] const std::optional<Pos>& exit() const { return exit_; }
  void set_exit(std::optional<Pos> p);

  [[nodiscard]] std::uint64_t step_count() const { return step_count_; }
  void set_step_count(std::uint64_t n) { step_count_ = n; }

  [[nodiscard]] double spawn_probability() const { return spawn_probability_; }
  void set_spawn_probability(double p) { spawn_probability_ = p; }

  Rng& rng() { return rng_; }
  [[nodiscard]] const Rng& rng() const { return rng_; }
  void reseed(std::uint64_t seed) { rng_ = Rng(seed); }

  [[nodiscard]] int count_if(bool (*pred)(const Cell&)) const;

  // Cells, goals, agent and exit agree. Step counter and RNG are ignored.
  [[nodiscard]] bool same_layout(const Board& other) const;

  // Hash of the layout plus step counter. Stable across platforms.
  [[nodiscard]] std::uint64_t hash() const;

  friend bool operator==(const Board& a, const Board& b);

 private:
  [[nodiscard]] int wrap_x(int x) const {
    const int r = x % width_;
    return r < 0 ? r + width_ : r;
  }
  [[nodiscard]] int wrap_y(int y) const {
    const int r = y % height_;
    return r < 0 ? r + height_ : r;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Cell> cells_;
  std::vector<Goal> goals_;
  std::optional<Pos> agent_;
  std::optional<Pos> exit_;
  std::uint64_t step_count_ = 0;
  double spawn_probability_ = kDefaultSpawnProbability;
  Rng rng_;
};

// Minimal wrapped displacement along each axis.
Pos wrapped_delta(Pos a, Pos b, int width, int height);

// Same board shifted by (dx, dy), agent and exit included.
Board translated(const Board& board, int dx, int dy);

}  // namespace safelife
