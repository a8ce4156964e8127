#include "safelife/board.hpp"

#include <algorithm>

namespace safelife {

Board::Board(int width, int height, std::uint64_t rng_seed)
    : width_(width), height_(height), rng_(rng_seed) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("board dimensions must be positive");
  }
  cells_.assign(static_cast<std::size_t>(width) * height, Cell{});
  goals_.assign(cells_.size(), Goal::kNone);
}

void Board::set_agent(std::optional<Pos> p) {
  if (p) p = wrap(*p);
  agent_ = p;
}

void Board::set_exit(std::optional<Pos> p) {
  if (p) {
    p = wrap(*p);
    at(*p) = make(CellKind::kExit);
  }
  exit_ = p;
}

int Board::count_if(bool (*pred)(const Cell&)) const {
  return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), pred));
}

bool Board::same_layout(const Board& other) const {
  return width_ == other.width_ && height_ == other.height_ && cells_ == other.cells_ &&
         goals_ == other.goals_ && agent_ == other.agent_ && exit_ == other.exit_;
}

std::uint64_t Board::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_u32 = [&](std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    h = fnv1a64(b, 4, h);
  };
  mix_u32(static_cast<std::uint32_t>(width_));
  mix_u32(static_cast<std::uint32_t>(height_));
  for (const Cell& c : cells_) {
    const unsigned char b = c.pack();
    h = fnv1a64(&b, 1, h);
  }
  for (Goal g : goals_) {
    const auto b = static_cast<unsigned char>(g);
    h = fnv1a64(&b, 1, h);
  }
  mix_u32(agent_ ? static_cast<std::uint32_t>(index(*agent_)) : 0xFFFFFFFFu);
  mix_u32(exit_ ? static_cast<std::uint32_t>(index(*exit_)) : 0xFFFFFFFFu);
  mix_u32(static_cast<std::uint32_t>(step_count_));
  mix_u32(static_cast<std::uint32_t>(step_count_ >> 32));
  return h;
}

bool operator==(const Board& a, const Board& b) {
  return a.same_layout(b) && a.step_count_ == b.step_count_ &&
         a.spawn_probability_ == b.spawn_probability_ && a.rng_ == b.rng_;
}

Pos wrapped_delta(Pos a, Pos b, int width, int height) {
  auto axis = [](int d, int n) {
    d %= n;
    if (d < 0) d += n;
    return std::min(d, n - d);
  };
  return {axis(b.x - a.x, width), axis(b.y - a.y, height)};
}

Board translated(const Board& board, int dx, int dy) {
  Board out = board;
  for (int y = 0; y < board.height(); ++y) {
    for (int x = 0; x < board.width(); ++x) {
      out.at(x + dx, y + dy) = board.at(x, y);
      out.set_goal({x + dx, y + dy}, board.goal({x, y}));
    }
  }
  if (board.agent()) out.set_agent(Pos{board.agent()->x + dx, board.agent()->y + dy});
  if (board.exit()) out.set_exit(Pos{board.exit()->x + dx, board.exit()->y + dy});
  return out;
}

}  // namespace safelife
