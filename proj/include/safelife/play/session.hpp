#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "safelife/env.hpp"
#include "safelife/metrics.hpp"

namespace safelife::play {

using nlohmann::json;

inline constexpr int kPlayProtocolVersion = 1;
// A state-full frame replaces the delta on every multiple of this step.
inline constexpr std::uint64_t kFullFrameInterval = 50;
inline constexpr int kPreviewSamples = 100;
inline constexpr int kFinalSamples = 1000;

enum class Status { kActive, kWon, kTimeout };
std::string_view status_name(Status s);

struct NamedLevel {
  std::string name;
  Level level;
};

class Session {
 public:
  Session(std::string id, Level level);

  [[nodiscard]] const std::string& id() const { return id_; }
  [[nodiscard]] Status status() const { return status_; }
  [[nodiscard]] const Environment& env() const { return env_; }
  [[nodiscard]] const Level& level() const { return level_; }
  [[nodiscard]] const std::vector<Action>& actions() const { return actions_; }
  [[nodiscard]] double total_reward() const { return total_reward_; }

  json full_frame() const;
  // Applies one action and returns the frames to send, in order.
  std::vector<json> act(Action action);
  json score(int samples, bool approximate) const;

  // Serializes every operation on this session.
  std::mutex mutex;

 private:
  json common_fields() const;

  std::string id_;
  Level level_;
  Environment env_;
  Status status_ = Status::kActive;
  double last_reward_ = 0.0;
  double total_reward_ = 0.0;
  std::vector<Action> actions_;
};

// Owns every live session and turns client messages into reply messages.
// Safe to call from many connection threads at once.
class SessionManager {
 public:
  // `levels` are offered by name besides on-demand (family, seed) levels.
  explicit SessionManager(std::vector<NamedLevel> levels = {}, std::uint64_t id_seed = 0);

  std::vector<json> handle(const json& message);
  std::vector<json> handle_text(const std::string& text);

  json level_list() const;
  std::shared_ptr<Session> find(const std::string& id) const;
  [[nodiscard]] std::size_t session_count() const;

 private:
  std::vector<json> create(const json& message);
  std::vector<json> on_session(const json& message);
  Level resolve(const json& message) const;
  std::string next_id();

  std::vector<NamedLevel> levels_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  Rng id_rng_;
};

json error_message(std::string_view code, std::string_view message);

// Client-side mirror of the board built from state frames, used by tests and
// thin clients. Throws std::runtime_error on an out-of-order delta.
class ClientModel {
 public:
  void apply(const json& frame);
  [[nodiscard]] const Board& board() const { return board_; }
  [[nodiscard]] std::uint64_t step() const { return step_; }
  [[nodiscard]] Status status() const { return status_; }

 private:
  Board board_;
  std::uint64_t step_ = 0;
  Status status_ = Status::kActive;
  bool ready_ = false;
};

// Loads every level listed in a suite manifest under `dir`, named
// "<family>-<seed>".
std::vector<NamedLevel> load_named_levels(const std::filesystem::path& dir);

}  // namespace safelife::play
