#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "safelife/board.hpp"

namespace safelife {

// Axis-aligned rectangle in board coordinates; may wrap around the torus.
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  [[nodiscard]] Rect inset(int k) const { return {x + k, y + k, width - 2 * k, height - 2 * k}; }
  [[nodiscard]] Rect outset(int k) const { return inset(-k); }
};

// Per-cell selection over a board. Cells outside the mask are never
// modified by the generators.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool value = false);
  static Mask of(const Board& board, Rect r);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] bool test(int index) const { return bits_[index] != 0; }
  [[nodiscard]] bool test(const Board& b, Pos p) const { return bits_[b.index(p)] != 0; }
  void set(int index, bool v = true) { bits_[index] = v ? 1 : 0; }
  void set_rect(const Board& b, Rect r, bool v = true);
  [[nodiscard]] int count() const;
  // Cells within Chebyshev distance `radius` of the mask.
  [[nodiscard]] Mask dilated(const Board& b, int radius) const;
  [[nodiscard]] bool intersects(const Mask& other) const;
  Mask& operator|=(const Mask& other);
  Mask& subtract(const Mask& other);

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct PenaltyRule {
  Cell cell;
  double base = 0.0;
  // Added per unit of this cell type's current density inside the mask.
  double density_scale = 0.0;
};

struct GenConfig {
  double temperature = 0.4;
  double min_density = 0.2;
  // Penalty on Empty candidates while the pattern is free of violations but
  // still below min_density. Repairs are never biased by it.
  double empty_penalty = 5.0;
  // Cell types the sampler may place besides Empty.
  std::vector<PenaltyRule> palette = {{make(CellKind::kLife, color::kGreen), 0.0, 0.0}};
  // 0 selects the default of 50 iterations per masked cell.
  std::uint64_t max_iterations = 0;
  std::uint64_t seed = 0;
};

struct OscillatorSpec {
  int period = 2;
  double still_life_penalty = 2.0;
};

inline constexpr int kMaxOscillatorPeriod = 3;

struct GenResult {
  bool ok = false;
  std::uint64_t iterations = 0;
  Board board;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Live (Life, HardLife, Tree) cells among the 8 wrapped neighbors.
int live_neighbors(const Board& board, Pos p);

// Neighbor switches needed to keep the cell at `p` unchanged for one step.
int count_violations(const Board& board, Pos p);

// Sum of count_violations over the mask grown by one cell.
int total_violations(const Board& board, const Mask& mask);

// Annealed still-life synthesis inside `mask`. On failure the masked cells
// are cleared and `ok` is false.
GenResult gen_still_life(const Board& board, const Mask& mask, const GenConfig& config);

// Annealed oscillator synthesis. Period 1 is exactly gen_still_life; larger
// periods succeed only with a pattern that returns to itself after `period`
// steps and is not a still life.
GenResult gen_oscillator(const Board& board, const Mask& mask, const GenConfig& config,
                         const OscillatorSpec& osc);

// Walls on every third cell of the rectangle's perimeter. Throws
// std::invalid_argument if either side is shorter than 3.
Board build_fence(const Board& board, Rect region);

// Perimeter cells of `region` in clockwise order from its top-left corner.
std::vector<Pos> perimeter(Rect region);

}  // namespace safelife
