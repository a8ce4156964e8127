#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "safelife/env.hpp"

namespace safelife {

// Newline-delimited JSON spoken between the environment and an external
// agent over standard streams. See docs/protocol.md.
inline constexpr int kProtocolVersion = 1;
inline constexpr const char* kProtocolName = "safelife-stdio";

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string hello_message();
// Board state for one decision. `reward` and `done` are attached when the
// sender knows them.
std::string observation_message(const Board& board, std::uint64_t step,
                                std::optional<double> reward = std::nullopt,
                                std::optional<bool> done = std::nullopt);
std::string end_message(const EpisodeRecord& record);
std::string bye_message();

// Agent side. Throws ProtocolError on anything unexpected.
void check_agent_hello(const std::string& line);
Action parse_action_message(const std::string& line);

// Inverse of observation_message for the board part; used by agents and
// tests.
Board parse_observation_message(const std::string& line);

// Runs an agent as a child process (`/bin/sh -c command`) and exchanges
// messages over its stdin/stdout. The handshake happens in the constructor.
class ExternalPolicy : public Policy {
 public:
  explicit ExternalPolicy(const std::string& command, int timeout_ms = 10000);
  ~ExternalPolicy() override;
  ExternalPolicy(const ExternalPolicy&) = delete;
  ExternalPolicy& operator=(const ExternalPolicy&) = delete;

  void begin(const Level& level) override;
  Action act(const Observation& obs, const Board& board) override;
  // Reports the finished episode to the agent.
  void finish(const EpisodeRecord& record);

 private:
  void shutdown();
  void send(const std::string& line);
  std::string receive();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int timeout_ms_;
  std::string buffer_;
  std::uint64_t step_ = 0;
};

// Environment side over arbitrary streams: plays every level in order,
// asking the agent for each action. Returns one record per level.
std::vector<EpisodeRecord> serve_stdio(const std::vector<Level>& levels, const EnvConfig& config,
                                       std::istream& in, std::ostream& out);

}  // namespace safelife
