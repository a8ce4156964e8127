#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace safelife {

// Name written into level files; replays depend on this exact engine.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

// Seeded engine with portable draws. The standard distributions are not
// bit-identical across library implementations, so draws are derived from
// raw engine output directly.
class Rng {
 public:
  Rng() : engine_(0) {}
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic child seed for a named purpose ("baseline", "board", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace safelife
