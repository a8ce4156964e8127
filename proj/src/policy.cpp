#include "safelife/policy.hpp"

#include <array>
#include <deque>
#include <limits>
#include <vector>

namespace safelife {

void RandomPolicy::begin(const Level& level) { rng_ = Rng(splitmix64(seed_ ^ splitmix64(level.seed))); }

Action RandomPolicy::act(const Observation&, const Board&) {
  return static_cast<Action>(rng_.below(kNumActions));
}

namespace {

bool is_red_life(const Board& b, int i) {
  const Cell c = b.cells()[i];
  return is_life(c.kind) && (c.color & color::kRed) && !(c.color & color::kGreen);
}

bool is_exit(const Board& b, int i) { return b.cells()[i].kind == CellKind::kExit; }

// Cells next to a red cell, where a toggle would remove it.
bool beside_red(const Board& b, int i) {
  const Pos p = b.pos_of(i);
  for (int d = 0; d < 4; ++d) {
    const Pos o = offset(static_cast<Direction>(d));
    if (is_red_life(b, b.index(p.x + o.x, p.y + o.y))) return true;
  }
  return false;
}

}  // namespace

Action route_step(const Board& board, bool (*goal)(const Board&, int), bool clear_life) {
  if (!board.agent()) return Action::kNoop;
  const int n = board.size();
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> dist(n, kInf);
  std::vector<int> first(n, -1);  // direction of the first move
  const int start = board.index(*board.agent());
  dist[start] = 0;
  // Costs are 1 or 2, so a bucket queue suffices.
  std::array<std::deque<int>, 3> buckets;
  buckets[0].push_back(start);
  int level = 0;
  int pending = 1;
  while (pending > 0) {
    auto& bucket = buckets[level % 3];
    if (bucket.empty()) {
      ++level;
      continue;
    }
    const int i = bucket.front();
    bucket.pop_front();
    --pending;
    if (dist[i] != level) continue;
    if (goal(board, i)) {
      if (i == start) return Action::kNoop;
      const auto d = static_cast<Direction>(first[i]);
      const Pos o = offset(d);
      const Pos a = *board.agent();
      const CellKind next = board.at(a.x + o.x, a.y + o.y).kind;
      return next == CellKind::kEmpty || next == CellKind::kExit ? move(d) : toggle(d);
    }
    const Pos p = board.pos_of(i);
    for (int d = 0; d < 4; ++d) {
      const Pos o = offset(static_cast<Direction>(d));
      const int j = board.index(p.x + o.x, p.y + o.y);
      const CellKind k = board.cells()[j].kind;
      int cost;
      if (k == CellKind::kEmpty || k == CellKind::kExit) {
        cost = 1;
      } else if (clear_life && k == CellKind::kLife) {
        cost = 2;
      } else if (goal(board, j)) {
        cost = 1;
      } else {
        continue;
      }
      if (dist[i] + cost < dist[j]) {
        dist[j] = dist[i] + cost;
        first[j] = i == start ? d : first[i];
        buckets[dist[j] % 3].push_back(j);
        ++pending;
      }
    }
  }
  return Action::kNoop;
}

Action GreedyPolicy::act(const Observation&, const Board& board) {
  if (!board.agent()) return Action::kNoop;
  const Pos a = *board.agent();
  for (int d = 0; d < 4; ++d) {
    const Pos o = offset(static_cast<Direction>(d));
    if (is_red_life(board, board.index(a.x + o.x, a.y + o.y))) {
      return toggle(static_cast<Direction>(d));
    }
  }
  if (board.count_if([](const Cell& c) {
        return is_life(c.kind) && (c.color & color::kRed) && !(c.color & color::kGreen);
      }) > 0) {
    Action step = route_step(board, beside_red, false);
    if (step == Action::kNoop) step = route_step(board, beside_red, true);
    if (step != Action::kNoop) return step;
  }
  Action step = route_step(board, is_exit, false);
  if (step == Action::kNoop) step = route_step(board, is_exit, true);
  return step;
}

}  // namespace safelife
