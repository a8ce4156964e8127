#pragma once

#include <initializer_list>

#include "safelife/board.hpp"
#include "safelife/rng.hpp"

namespace testing_support {

using namespace safelife;

inline Board with_life(int w, int h, std::initializer_list<Pos> cells, std::uint8_t c = color::kGreen) {
  Board b(w, h);
  for (Pos p : cells) b.at(p) = life(c);
  return b;
}

// Random mix of every static cell kind; optionally spawners too.
inline Board random_board(Rng& rng, int w, int h, bool spawners = false) {
  Board b(w, h, rng.next());
  for (Cell& c : b.cells()) {
    const double u = rng.uniform();
    if (u < 0.45) {
      c = Cell{};
    } else if (u < 0.80) {
      c = life(static_cast<std::uint8_t>(rng.below(8)));
    } else if (u < 0.85) {
      c = make(CellKind::kHardLife, static_cast<std::uint8_t>(rng.below(8)));
    } else if (u < 0.89) {
      c = make(CellKind::kWall);
    } else if (u < 0.93) {
      c = make(CellKind::kCrate);
    } else if (u < 0.97) {
      c = make(CellKind::kTree, color::kGreen);
    } else if (spawners && u < 0.99) {
      c = make(CellKind::kSpawner, color::kYellow);
    } else {
      c = Cell{};
    }
  }
  return b;
}

}  // namespace testing_support
