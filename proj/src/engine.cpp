#include "safelife/engine.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace safelife {

namespace {

constexpr std::array<std::string_view, kNumActions> kActionNames = {
    "noop", "move_n", "move_e", "move_s", "move_w", "toggle_n", "toggle_e", "toggle_s", "toggle_w"};

// Scratch buffers reused across steps on the same thread.
struct Scratch {
  std::vector<std::uint8_t> alive;
  std::vector<std::uint8_t> frozen;
  std::vector<Cell> next;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

std::optional<Action> action_from_index(int index) {
  if (index < 0 || index >= kNumActions) return std::nullopt;
  return static_cast<Action>(index);
}

std::optional<Action> action_from_name(std::string_view name) {
  for (int i = 0; i < kNumActions; ++i) {
    if (kActionNames[i] == name) return static_cast<Action>(i);
  }
  return std::nullopt;
}

std::string_view action_name(Action a) { return kActionNames[static_cast<int>(a)]; }

void apply_action_in_place(Board& board, Action action) {
  if (!board.agent() || action == Action::kNoop) return;
  const Pos agent = *board.agent();
  const Pos d = offset(direction_of(action));
  const Pos target = board.wrap({agent.x + d.x, agent.y + d.y});
  Cell& cell = board.at(target);

  if (is_toggle(action)) {
    if (cell.kind == CellKind::kEmpty) {
      cell = make(CellKind::kLife);
    } else if (cell.kind == CellKind::kLife) {
      cell = Cell{};
    }
    return;
  }

  switch (cell.kind) {
    case CellKind::kEmpty:
    case CellKind::kExit:
      board.set_agent(target);
      break;
    case CellKind::kCrate: {
      Cell& beyond = board.at(target.x + d.x, target.y + d.y);
      if (beyond.kind == CellKind::kEmpty) {
        beyond = cell;
        cell = Cell{};
        board.set_agent(target);
      }
      break;
    }
    default:
      break;
  }
}

Board apply_action(const Board& board, Action action) {
  Board next = board;
  apply_action_in_place(next, action);
  return next;
}

void ca_step_in_place(Board& board) {
  const int w = board.width();
  const int h = board.height();
  const int n = board.size();
  Scratch& s = scratch();
  s.alive.resize(n);
  s.frozen.assign(n, 0);
  s.next.assign(board.cells().begin(), board.cells().end());

  const std::span<const Cell> cells = board.cells();
  for (int i = 0; i < n; ++i) s.alive[i] = is_alive(cells[i].kind) ? 1 : 0;

  if (board.agent()) {
    const Pos a = *board.agent();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) s.frozen[board.index(a.x + dx, a.y + dy)] = 1;
    }
  }

  bool has_spawner = false;
  for (int y = 0; y < h; ++y) {
    const int rows[3] = {((y + h - 1) % h) * w, y * w, ((y + 1) % h) * w};
    for (int x = 0; x < w; ++x) {
      const int i = rows[1] + x;
      const CellKind kind = cells[i].kind;
      if (kind == CellKind::kSpawner) has_spawner = true;
      if (s.frozen[i] || !(kind == CellKind::kEmpty || is_life(kind))) continue;

      const int cols[3] = {(x + w - 1) % w, x, (x + 1) % w};
      int count = 0;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) count += s.alive[rows[r] + cols[c]];
      }
      count -= s.alive[i];

      if (kind == CellKind::kEmpty) {
        if (count != 3) continue;
        int votes[3] = {0, 0, 0};
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) {
            const int j = rows[r] + cols[c];
            if (j == i || !s.alive[j]) continue;
            const std::uint8_t col = cells[j].color;
            for (int b = 0; b < 3; ++b) votes[b] += (col >> b) & 1;
          }
        }
        std::uint8_t born = 0;
        for (int b = 0; b < 3; ++b) {
          if (votes[b] >= 2) born |= static_cast<std::uint8_t>(1 << b);
        }
        s.next[i] = life(born);
      } else if (count < 2 || count > 3) {
        s.next[i] = Cell{};
      }
    }
  }

  const double p = board.spawn_probability();
  if (has_spawner && p > 0.0) {
    Rng& rng = board.rng();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int i = y * w + x;
        if (s.frozen[i] || s.next[i].kind != CellKind::kEmpty) continue;
        bool near_spawner = false;
        for (int dy = -1; dy <= 1 && !near_spawner; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx || dy) && board.at(x + dx, y + dy).kind == CellKind::kSpawner) {
              near_spawner = true;
              break;
            }
          }
        }
        if (near_spawner && rng.bernoulli(p)) s.next[i] = life(color::kYellow);
      }
    }
  }

  std::copy(s.next.begin(), s.next.end(), board.cells().begin());
  board.set_step_count(board.step_count() + 1);
}

Board ca_step(const Board& board) {
  Board next = board;
  ca_step_in_place(next);
  return next;
}

int board_value(const Board& board) {
  int value = 0;
  const auto cells = board.cells();
  const auto goals = board.goals();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!is_life(cells[i].kind)) continue;
    if (goals[i] == Goal::kBlue) value += 3;
    const std::uint8_t c = cells[i].color;
    if ((c & color::kRed) && !(c & color::kGreen)) value -= 1;
  }
  return value;
}

int max_board_value(const Board& board) {
  const auto goals = board.goals();
  return 3 * static_cast<int>(std::count(goals.begin(), goals.end(), Goal::kBlue));
}

ExitGate ExitGate::from(const Board& initial, double min_performance) {
  return ExitGate{board_value(initial), max_board_value(initial), min_performance};
}

double ExitGate::performance(int value) const {
  if (max_value <= initial_value) return 1.0;
  const double f = static_cast<double>(value - initial_value) / (max_value - initial_value);
  return std::clamp(f, 0.0, 1.0);
}

double performance_fraction(const Board& board, const Board& initial) {
  return ExitGate::from(initial, 0.0).performance(board_value(board));
}

int env_step_in_place(Board& board, Action action, const ExitGate& gate, bool& exited) {
  const int before = board_value(board);
  apply_action_in_place(board, action);
  ca_step_in_place(board);
  const int after = board_value(board);
  int reward = after - before;
  exited = board.agent() && board.exit() && *board.agent() == *board.exit() && gate.open(after);
  if (exited) reward += 1;
  return reward;
}

StepOutcome env_step(const Board& board, Action action, const ExitGate& gate) {
  StepOutcome out{0, false, board};
  out.reward = env_step_in_place(out.board, action, gate, out.exited);
  return out;
}

}  // namespace safelife
