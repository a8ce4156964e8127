#include "safelife/levelgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "safelife/engine.hpp"

namespace safelife {

Mask::Mask(int width, int height, bool value)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(width) * height, value ? 1 : 0) {}

Mask Mask::of(const Board& board, Rect r) {
  Mask m(board.width(), board.height());
  m.set_rect(board, r);
  return m;
}

void Mask::set_rect(const Board& b, Rect r, bool v) {
  for (int dy = 0; dy < r.height; ++dy) {
    for (int dx = 0; dx < r.width; ++dx) set(b.index(r.x + dx, r.y + dy), v);
  }
}

int Mask::count() const { return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1)); }

Mask Mask::dilated(const Board& b, int radius) const {
  Mask out(width_, height_);
  for (int i = 0; i < static_cast<int>(bits_.size()); ++i) {
    if (!bits_[i]) continue;
    const Pos p = b.pos_of(i);
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) out.set(b.index(p.x + dx, p.y + dy));
    }
  }
  return out;
}

bool Mask::intersects(const Mask& other) const {
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && other.bits_[i]) return true;
  }
  return false;
}

Mask& Mask::operator|=(const Mask& other) {
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

Mask& Mask::subtract(const Mask& other) {
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (other.bits_[i]) bits_[i] = 0;
  }
  return *this;
}

int live_neighbors(const Board& board, Pos p) {
  int k = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if ((dx || dy) && is_alive(board.at(p.x + dx, p.y + dy).kind)) ++k;
    }
  }
  return k;
}

int count_violations(const Board& board, Pos p) {
  const CellKind kind = board.at(p).kind;
  if (is_life(kind)) {
    const int k = live_neighbors(board, p);
    if (k < 2) return 2 - k;
    if (k > 3) return k - 3;
    return 0;
  }
  if (kind == CellKind::kEmpty) return live_neighbors(board, p) == 3 ? 1 : 0;
  return 0;
}

int total_violations(const Board& board, const Mask& mask) {
  const Mask check = mask.dilated(board, 1);
  int total = 0;
  for (int i = 0; i < board.size(); ++i) {
    if (check.test(i)) total += count_violations(board, board.pos_of(i));
  }
  return total;
}

namespace {

std::vector<int> indices_of(const Mask& m) {
  std::vector<int> out;
  for (int i = 0; i < m.width() * m.height(); ++i) {
    if (m.test(i)) out.push_back(i);
  }
  return out;
}

// Distinct wrapped indices within Chebyshev `radius` of p.
std::vector<int> window(const Board& b, Pos p, int radius) {
  std::vector<int> out;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) out.push_back(b.index(p.x + dx, p.y + dy));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Candidate {
  int index;
  Cell cell;
  double exponent;
};

// Shared state of the annealed samplers: mask bookkeeping, densities and
// Boltzmann selection.
class AnnealerBase {
 protected:
  AnnealerBase(const Board& board, const Mask& mask, const GenConfig& cfg, int reach)
      : board_(board), mask_(mask), check_(mask.dilated(board, reach)), cfg_(cfg),
        rng_(derive_seed(cfg.seed, "gen")), mask_cells_(indices_of(mask)),
        check_cells_(indices_of(check_)) {
    if (cfg.temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
    if (cfg.min_density < 0.0 || cfg.min_density >= 1.0) {
      throw std::invalid_argument("min_density must lie in [0, 1)");
    }
    max_iterations_ = cfg.max_iterations ? cfg.max_iterations : 50ULL * mask_cells_.size();
    for (int i : mask_cells_) {
      const CellKind k = board_.at(board_.pos_of(i)).kind;
      kind_counts_[static_cast<int>(k)]++;
    }
  }

  [[nodiscard]] int nonempty() const {
    return static_cast<int>(mask_cells_.size()) - kind_counts_[static_cast<int>(CellKind::kEmpty)];
  }

  [[nodiscard]] bool below_density() const {
    return nonempty() <= cfg_.min_density * static_cast<double>(mask_cells_.size());
  }

  // `filling` is true on iterations that sample an arbitrary mask cell
  // because the pattern is consistent but too sparse.
  [[nodiscard]] double penalty(const Cell& c, bool filling) const {
    const double s = static_cast<double>(mask_cells_.size());
    if (c.kind == CellKind::kEmpty) return filling && below_density() ? cfg_.empty_penalty : 0.0;
    for (const PenaltyRule& r : cfg_.palette) {
      if (r.cell == c) return r.base + r.density_scale * kind_counts_[static_cast<int>(c.kind)] / s;
    }
    return 0.0;
  }

  [[nodiscard]] std::vector<Cell> cell_types() const {
    std::vector<Cell> types{Cell{}};
    for (const PenaltyRule& r : cfg_.palette) types.push_back(r.cell);
    return types;
  }

  const Candidate& choose(const std::vector<Candidate>& cands) {
    double lo = std::numeric_limits<double>::infinity();
    for (const Candidate& c : cands) lo = std::min(lo, c.exponent);
    weights_.clear();
    double sum = 0.0;
    for (const Candidate& c : cands) {
      const double w = std::exp(-(c.exponent - lo) / cfg_.temperature);
      weights_.push_back(w);
      sum += w;
    }
    double r = rng_.uniform() * sum;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      r -= weights_[k];
      if (r < 0.0) return cands[k];
    }
    return cands.back();
  }

  void place(int index, Cell c) {
    Cell& slot = board_.cells()[index];
    kind_counts_[static_cast<int>(slot.kind)]--;
    kind_counts_[static_cast<int>(c.kind)]++;
    slot = c;
  }

  GenResult fail(std::uint64_t iterations) {
    for (int i : mask_cells_) board_.cells()[i] = Cell{};
    return GenResult{false, iterations, std::move(board_)};
  }

  Board board_;
  const Mask& mask_;
  Mask check_;
  const GenConfig& cfg_;
  Rng rng_;
  std::vector<int> mask_cells_;
  std::vector<int> check_cells_;
  std::uint64_t max_iterations_ = 0;
  int kind_counts_[kNumCellKinds] = {};
  std::vector<double> weights_;
};

class StillLifeAnnealer : AnnealerBase {
 public:
  StillLifeAnnealer(const Board& board, const Mask& mask, const GenConfig& cfg)
      : AnnealerBase(board, mask, cfg, 1), viol_(board.size(), 0) {
    for (int i : check_cells_) {
      viol_[i] = count_violations(board_, board_.pos_of(i));
      total_ += viol_[i];
    }
  }

  GenResult run() {
    const std::vector<Cell> types = cell_types();
    std::vector<int> violating;
    std::vector<Candidate> cands;
    std::uint64_t iter = 0;
    while (true) {
      violating.clear();
      for (int i : check_cells_) {
        if (viol_[i] > 0) violating.push_back(i);
      }
      int chosen;
      const bool filling = violating.empty();
      if (!filling) {
        chosen = violating[rng_.below(violating.size())];
      } else if (below_density() && !mask_cells_.empty()) {
        chosen = mask_cells_[rng_.below(mask_cells_.size())];
      } else {
        return GenResult{true, iter, std::move(board_)};
      }
      if (iter >= max_iterations_) return fail(iter);
      ++iter;

      cands.clear();
      for (int q : window(board_, board_.pos_of(chosen), 1)) {
        if (!mask_.test(q)) continue;
        for (const Cell& c : types) {
          const double y = total_ + delta(q, c);
          cands.push_back({q, c, y + penalty(c, filling)});
        }
      }
      const Candidate pick = choose(cands);
      apply(pick.index, pick.cell);
    }
  }

 private:
  int delta(int q, Cell c) {
    Cell& slot = board_.cells()[q];
    if (slot == c) return 0;
    const Cell old = slot;
    slot = c;
    int d = 0;
    for (int r : window(board_, board_.pos_of(q), 1)) {
      if (check_.test(r)) d += count_violations(board_, board_.pos_of(r)) - viol_[r];
    }
    slot = old;
    return d;
  }

  void apply(int q, Cell c) {
    if (board_.cells()[q] == c) return;
    place(q, c);
    for (int r : window(board_, board_.pos_of(q), 1)) {
      if (!check_.test(r)) continue;
      const int v = count_violations(board_, board_.pos_of(r));
      total_ += v - viol_[r];
      viol_[r] = v;
    }
  }

  std::vector<int> viol_;
  int total_ = 0;
};

// Deterministic automaton rules without agent or spawners, used by the
// oscillator search.
Board dynamics_only(const Board& board) {
  Board b = board;
  b.set_agent(std::nullopt);
  b.set_spawn_probability(0.0);
  return b;
}

class OscillatorAnnealer : AnnealerBase {
 public:
  OscillatorAnnealer(const Board& board, const Mask& mask, const GenConfig& cfg,
                     const OscillatorSpec& osc)
      : AnnealerBase(dynamics_only(board), mask, cfg, osc.period), period_(osc.period),
        still_penalty_(osc.still_life_penalty), viol_(board.size(), 0) {
    local_ = board_.width() >= 4 * period_ + 1 && board_.height() >= 4 * period_ + 1;
    recompute_all();
  }

  GenResult run() {
    const std::vector<Cell> types = cell_types();
    std::vector<int> violating;
    std::vector<Candidate> cands;
    std::uint64_t iter = 0;
    while (true) {
      violating.clear();
      for (int i : check_cells_) {
        if (viol_[i] > 0) violating.push_back(i);
      }
      int chosen;
      const bool filling = violating.empty();
      if (!filling) {
        chosen = violating[rng_.below(violating.size())];
      } else if ((below_density() || region_is_still()) && !mask_cells_.empty()) {
        chosen = mask_cells_[rng_.below(mask_cells_.size())];
      } else {
        return GenResult{true, iter, std::move(board_)};
      }
      if (iter >= max_iterations_) return fail(iter);
      ++iter;

      cands.clear();
      for (int q : window(board_, board_.pos_of(chosen), period_)) {
        if (!mask_.test(q)) continue;
        for (const Cell& c : types) {
          const Eval e = evaluate(q, c);
          cands.push_back({q, c, total_ + e.delta + penalty(c, filling) + (e.still ? still_penalty_ : 0.0)});
        }
      }
      const Candidate pick = choose(cands);
      if (board_.cells()[pick.index] != pick.cell) {
        place(pick.index, pick.cell);
        if (local_) {
          refresh_window(pick.index);
        } else {
          recompute_all();
        }
      }
    }
  }

 private:
  struct Eval {
    int delta = 0;
    bool still = false;
  };

  // Evolve a (4N+1)^2 patch around q without wrapping. After N steps the
  // central (2N+1)^2 window is exact.
  void simulate_patch(int q, std::vector<std::uint8_t>& start, std::vector<std::uint8_t>& after1,
                      std::vector<std::uint8_t>& afterN, std::vector<std::uint8_t>& fixed) const {
    const int r = 2 * period_;
    const int side = 2 * r + 1;
    const Pos c = board_.pos_of(q);
    start.assign(side * side, 0);
    fixed.assign(side * side, 0);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const CellKind k = board_.at(c.x + dx, c.y + dy).kind;
        const int i = (dy + r) * side + (dx + r);
        start[i] = is_alive(k) ? 1 : 0;
        // Only Empty and Life cells follow the rules; everything else is fixed.
        fixed[i] = (k == CellKind::kEmpty || is_life(k)) ? 0 : 1;
      }
    }
    std::vector<std::uint8_t> cur = start, nxt(side * side, 0);
    for (int step = 1; step <= period_; ++step) {
      for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
          const int i = y * side + x;
          if (fixed[i]) {
            nxt[i] = cur[i];
            continue;
          }
          int k = 0;
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const int yy = y + dy, xx = x + dx;
              if ((dx || dy) && yy >= 0 && yy < side && xx >= 0 && xx < side) k += cur[yy * side + xx];
            }
          }
          nxt[i] = cur[i] ? (k == 2 || k == 3) : (k == 3);
        }
      }
      std::swap(cur, nxt);
      if (step == 1) after1 = cur;
    }
    afterN = cur;
  }

  Eval evaluate(int q, Cell c) {
    Cell& slot = board_.cells()[q];
    const Cell old = slot;
    slot = c;
    Eval e;
    if (local_) {
      simulate_patch(q, start_, after1_, afterN_, fixed_);
      const int r = 2 * period_;
      const int side = 2 * r + 1;
      const Pos p = board_.pos_of(q);
      bool any_life = false, any_change = false;
      for (int dy = -period_; dy <= period_; ++dy) {
        for (int dx = -period_; dx <= period_; ++dx) {
          const int li = (dy + r) * side + (dx + r);
          any_life |= start_[li] != 0;
          any_change |= after1_[li] != start_[li];
          const int gi = board_.index(p.x + dx, p.y + dy);
          if (!check_.test(gi)) continue;
          e.delta += static_cast<int>(afterN_[li] != start_[li]) - viol_[gi];
        }
      }
      e.still = any_life && !any_change;
    } else {
      std::vector<std::uint8_t> v;
      int total = 0;
      full_violations(v, total);
      e.delta = total - total_;
      e.still = region_is_still();
    }
    slot = old;
    return e;
  }

  void refresh_window(int q) {
    simulate_patch(q, start_, after1_, afterN_, fixed_);
    const int r = 2 * period_;
    const int side = 2 * r + 1;
    const Pos p = board_.pos_of(q);
    for (int dy = -period_; dy <= period_; ++dy) {
      for (int dx = -period_; dx <= period_; ++dx) {
        const int gi = board_.index(p.x + dx, p.y + dy);
        if (!check_.test(gi)) continue;
        const int li = (dy + r) * side + (dx + r);
        const int v = afterN_[li] != start_[li] ? 1 : 0;
        total_ += v - viol_[gi];
        viol_[gi] = v;
      }
    }
  }

  void full_violations(std::vector<std::uint8_t>& v, int& total) const {
    Board evolved = board_;
    for (int s = 0; s < period_; ++s) ca_step_in_place(evolved);
    v.assign(board_.size(), 0);
    total = 0;
    for (int i : check_cells_) {
      v[i] = is_alive(evolved.cells()[i].kind) != is_alive(board_.cells()[i].kind) ? 1 : 0;
      total += v[i];
    }
  }

  void recompute_all() {
    std::vector<std::uint8_t> v;
    full_violations(v, total_);
    for (int i : check_cells_) viol_[i] = v[i];
  }

  [[nodiscard]] bool region_is_still() const {
    Board next = ca_step(board_);
    for (int i : check_cells_) {
      if (is_alive(next.cells()[i].kind) != is_alive(board_.cells()[i].kind)) return false;
    }
    return true;
  }

  int period_;
  double still_penalty_;
  bool local_ = true;
  std::vector<int> viol_;
  int total_ = 0;
  std::vector<std::uint8_t> start_, after1_, afterN_, fixed_;
};

}  // namespace

GenResult gen_still_life(const Board& board, const Mask& mask, const GenConfig& config) {
  return StillLifeAnnealer(board, mask, config).run();
}

GenResult gen_oscillator(const Board& board, const Mask& mask, const GenConfig& config,
                         const OscillatorSpec& osc) {
  if (osc.period < 1 || osc.period > kMaxOscillatorPeriod) {
    throw std::invalid_argument("oscillator period must lie in [1, 3]");
  }
  if (osc.period == 1) return gen_still_life(board, mask, config);
  GenResult r = OscillatorAnnealer(board, mask, config, osc).run();
  // Restore what the dynamics-only copy dropped.
  r.board.set_agent(board.agent());
  r.board.set_spawn_probability(board.spawn_probability());
  return r;
}

std::vector<Pos> perimeter(Rect r) {
  std::vector<Pos> out;
  for (int x = 0; x < r.width; ++x) out.push_back({r.x + x, r.y});
  for (int y = 1; y < r.height; ++y) out.push_back({r.x + r.width - 1, r.y + y});
  for (int x = r.width - 2; x >= 0; --x) out.push_back({r.x + x, r.y + r.height - 1});
  for (int y = r.height - 2; y >= 1; --y) out.push_back({r.x, r.y + y});
  return out;
}

Board build_fence(const Board& board, Rect region) {
  if (region.width < 3 || region.height < 3) {
    throw std::invalid_argument("fence region must be at least 3x3");
  }
  if (region.width > board.width() || region.height > board.height()) {
    throw std::invalid_argument("fence region does not fit on the board");
  }
  Board out = board;
  const std::vector<Pos> loop = perimeter(region);
  for (std::size_t k = 0; k < loop.size(); k += 3) out.at(loop[k]) = make(CellKind::kWall);
  return out;
}

}  // namespace safelife
