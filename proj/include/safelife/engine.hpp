#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "safelife/board.hpp"

namespace safelife {

// The closed action set: no-op, four moves, four toggles.
enum class Action : std::uint8_t {
  kNoop = 0,
  kMoveNorth = 1,
  kMoveEast = 2,
  kMoveSouth = 3,
  kMoveWest = 4,
  kToggleNorth = 5,
  kToggleEast = 6,
  kToggleSouth = 7,
  kToggleWest = 8,
};

inline constexpr int kNumActions = 9;

constexpr bool is_move(Action a) { return a >= Action::kMoveNorth && a <= Action::kMoveWest; }
constexpr bool is_toggle(Action a) { return a >= Action::kToggleNorth; }
constexpr Direction direction_of(Action a) {
  const auto v = static_cast<std::uint8_t>(a);
  return static_cast<Direction>(is_toggle(a) ? v - 5 : v - 1);
}
constexpr Action move(Direction d) { return static_cast<Action>(1 + static_cast<int>(d)); }
constexpr Action toggle(Direction d) { return static_cast<Action>(5 + static_cast<int>(d)); }

std::optional<Action> action_from_index(int index);
std::optional<Action> action_from_name(std::string_view name);
std::string_view action_name(Action a);

// Task parameters that travel with a level.
struct LevelParams {
  double min_performance = 0.5;
  int time_limit = 1000;
  friend bool operator==(const LevelParams&, const LevelParams&) = default;
};

// Point values needed to decide whether the exit is open. Built once from
// the initial board.
struct ExitGate {
  int initial_value = 0;
  int max_value = 0;
  double min_performance = 0.0;

  static ExitGate from(const Board& initial, double min_performance);
  [[nodiscard]] double performance(int value) const;
  [[nodiscard]] bool open(int value) const { return performance(value) >= min_performance; }
};

struct StepOutcome {
  int reward = 0;
  bool exited = false;
  Board board;
};

// Agent interaction only; the cellular automaton does not advance.
Board apply_action(const Board& board, Action action);
void apply_action_in_place(Board& board, Action action);

// One simultaneous update of the automaton, followed by spawner births.
Board ca_step(const Board& board);
void ca_step_in_place(Board& board);

// 3 per living cell on a blue goal, -1 per red (not yellow) living cell.
int board_value(const Board& board);

// Highest value reachable on this goal layer: every blue goal alive.
int max_board_value(const Board& board);

double performance_fraction(const Board& board, const Board& initial);

StepOutcome env_step(const Board& board, Action action, const ExitGate& gate);

// In-place variant of env_step; returns the reward and sets `exited`.
int env_step_in_place(Board& board, Action action, const ExitGate& gate, bool& exited);

}  // namespace safelife
