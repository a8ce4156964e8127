#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "safelife/env.hpp"
#include "safelife/level.hpp"
#include "safelife/metrics.hpp"

namespace safelife {

// Level file layout, version 1. All integers little-endian.
//
//   "SLVL"                magic
//   u16 version           = 1
//   u16 width, u16 height
//   u8  family            LevelFamily
//   u64 seed
//   u32 generator_version
//   u16 agent x, y        0xFFFF when absent
//   u16 exit x, y         0xFFFF when absent
//   f64 min_performance   IEEE-754 bits
//   u32 time_limit
//   f64 spawn_probability IEEE-754 bits
//   u64 step_count
//   u8  rng name length, rng name bytes ("mt19937_64")
//   u64 rng seed
//   w*h bytes             cells: kind | color << 4
//   w*h bytes             goals
//   u64 FNV-1a checksum of every preceding byte
inline constexpr std::uint16_t kLevelFormatVersion = 1;
inline constexpr int kMaxBoardSide = 1024;

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class CorruptFileError : public StoreError {
 public:
  using StoreError::StoreError;
};
class VersionError : public StoreError {
 public:
  using StoreError::StoreError;
};
class DimensionError : public StoreError {
 public:
  using StoreError::StoreError;
};
class SchemaError : public StoreError {
 public:
  using StoreError::StoreError;
};

std::vector<std::uint8_t> encode_level(const Level& level);
Level decode_level(std::span<const std::uint8_t> bytes);

void save_level(const std::filesystem::path& path, const Level& level);
Level load_level(const std::filesystem::path& path);

std::string level_file_name(LevelFamily family, std::uint64_t seed);
std::string hex64(std::uint64_t v);

// Benchmark suite: one family over a list of seeds.
struct SuiteEntry {
  std::uint64_t seed = 0;
  std::string file;
  std::uint64_t hash = 0;  // FNV-1a of the level file bytes
};

struct SuiteManifest {
  std::uint32_t version = 1;
  std::uint32_t generator_version = kGeneratorVersion;
  LevelFamily family = LevelFamily::kPruneStill;
  std::vector<SuiteEntry> levels;
};

// Generates benchmark levels for `seeds` into `dir` and writes
// manifest.json there.
SuiteManifest generate_suite(LevelFamily family, const std::vector<std::uint64_t>& seeds,
                             const std::filesystem::path& dir);

void write_manifest(const std::filesystem::path& path, const SuiteManifest& manifest);
SuiteManifest read_manifest(const std::filesystem::path& path);

// Loads every level listed in the manifest, checking file hashes.
std::vector<Level> load_suite(const std::filesystem::path& manifest_path);

// Regenerates each manifest entry and compares bytes with the stored hash.
// Returns the seeds that did not reproduce.
std::vector<std::uint64_t> verify_suite(const SuiteManifest& manifest);

// Episode log: enough to replay and check the outcome.
struct EpisodeLog {
  LevelFamily family = LevelFamily::kPruneStill;
  std::uint64_t level_seed = 0;
  std::uint64_t level_hash = 0;
  std::vector<Action> actions;
  std::vector<double> rewards;
  std::uint64_t steps = 0;
  bool exited = false;
  bool timeout = false;
  double performance = 0.0;
  double cumulative_penalty = 0.0;
  std::uint64_t final_board_hash = 0;
};

EpisodeLog to_log(const EpisodeRecord& record);
std::string encode_episode(const EpisodeLog& log);
EpisodeLog decode_episode(const std::string& text);

// Benchmark results.
struct BenchmarkRow {
  LevelFamily family = LevelFamily::kPruneStill;
  std::uint64_t seed = 0;
  int repeat = 0;
  double lambda = 0.0;
  double performance = 0.0;
  std::uint64_t length = 0;
  bool exited = false;
  SideEffectScore side_effects;

  friend bool operator==(const BenchmarkRow&, const BenchmarkRow&) = default;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& values);

struct BenchmarkAggregate {
  LevelFamily family = LevelFamily::kPruneStill;
  double lambda = 0.0;
  std::size_t count = 0;
  MeanSd performance;
  MeanSd length;
  MeanSd green;
  MeanSd yellow;
  double completed = 0.0;
};

struct BenchmarkReport {
  std::string policy;
  int samples = 0;
  std::vector<BenchmarkRow> rows;

  // One entry per (family, lambda), in first-appearance order.
  [[nodiscard]] std::vector<BenchmarkAggregate> aggregates() const;
};

std::string encode_report(const BenchmarkReport& report);
BenchmarkReport decode_report(const std::string& text);
void write_report(const std::filesystem::path& path, const BenchmarkReport& report);
BenchmarkReport read_report(const std::filesystem::path& path);

// Human-readable table with the columns Task, Penalty, Performance, Length
// and Side effects (Green, Yellow); navigation rows report Completed instead
// of Performance.
std::string format_report_table(const BenchmarkReport& report);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace safelife
