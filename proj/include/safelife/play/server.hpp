#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "safelife/play/session.hpp"

namespace safelife::play {

// HTTP + WebSocket front end for a SessionManager.
//   GET /health   {"status":"ok","sessions":N}
//   GET /levels   level_list()
//   GET /ws       upgrade; one JSON message per text frame
class Server {
 public:
  Server(SessionManager& manager, const std::string& address, std::uint16_t port);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Port actually bound (useful when constructed with port 0).
  [[nodiscard]] std::uint16_t port() const;

  // Accepts connections on a background thread until stop().
  void start();
  // Blocks the caller until stop() is called from elsewhere.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace safelife::play
