#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "safelife/env.hpp"

namespace safelife {

class NoopPolicy : public Policy {
 public:
  Action act(const Observation&, const Board&) override { return Action::kNoop; }
};

// Uniform over all nine actions.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : seed_(seed), rng_(seed) {}
  void begin(const Level& level) override;
  Action act(const Observation& obs, const Board& board) override;

 private:
  std::uint64_t seed_;
  Rng rng_;
};

// Scripted stand-in for a trained destroyer: walks to the nearest red life
// cell, toggles it off, repeats, then heads for the exit. Non-red life in
// the way is cleared when no open route exists.
class GreedyPolicy : public Policy {
 public:
  Action act(const Observation& obs, const Board& board) override;
};

// First action of a shortest route from the agent to any cell accepted by
// `goal`. Routes through empty cells and the exit; with `clear_life`,
// living cells may be toggled away at the cost of an extra step. Returns
// noop when nothing is reachable.
Action route_step(const Board& board, bool (*goal)(const Board&, int), bool clear_life);

}  // namespace safelife
