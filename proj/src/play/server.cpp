#include "safelife/play/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <list>
#include <mutex>
#include <thread>

namespace safelife::play {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct Server::Impl {
  SessionManager& manager;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  std::thread accept_thread;
  std::atomic<bool> stopping{false};

  struct Connection {
    int fd = -1;
    bool done = false;
    std::thread worker;
  };
  std::mutex conn_mutex;
  std::list<Connection> connections;

  Impl(SessionManager& m, const std::string& address, std::uint16_t port)
      : manager(m), acceptor(ioc, tcp::endpoint(asio::ip::make_address(address), port)) {}

  void accept_loop() {
    while (!stopping) {
      beast::error_code ec;
      tcp::socket socket(ioc);
      acceptor.accept(socket, ec);
      if (ec) {
        if (stopping) return;
        continue;
      }
      std::lock_guard lock(conn_mutex);
      reap();
      Connection& c = connections.emplace_back();
      c.fd = socket.native_handle();
      c.worker = std::thread([this, &c, s = std::move(socket)]() mutable {
        serve(s);
        std::lock_guard done_lock(conn_mutex);
        c.done = true;
        // The socket closes when this lambda is destroyed, after `done` is
        // visible, so stop() never touches a recycled descriptor.
      });
    }
  }

  // Caller holds conn_mutex.
  void reap() {
    for (auto it = connections.begin(); it != connections.end();) {
      if (it->done) {
        it->worker.join();
        it = connections.erase(it);
      } else {
        ++it;
      }
    }
  }

  http::response<http::string_body> reply(const http::request<http::string_body>& req) {
    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(false);
    res.set(http::field::content_type, "application/json");
    res.set(http::field::access_control_allow_origin, "*");
    if (req.method() != http::verb::get) {
      res.result(http::status::method_not_allowed);
      res.body() = error_message("malformed", "only GET is supported").dump();
    } else if (req.target() == "/health") {
      res.result(http::status::ok);
      res.body() = json{{"status", "ok"}, {"sessions", manager.session_count()}}.dump();
    } else if (req.target() == "/levels") {
      res.result(http::status::ok);
      res.body() = manager.level_list().dump();
    } else {
      res.result(http::status::not_found);
      res.body() = error_message("not-found", "no such endpoint").dump();
    }
    res.prepare_payload();
    return res;
  }

  void serve(tcp::socket& socket) {
    beast::error_code ec;
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    http::read(socket, buffer, req, ec);
    if (ec) return;
    if (!websocket::is_upgrade(req)) {
      http::write(socket, reply(req), ec);
      socket.shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    websocket::stream<tcp::socket&> ws(socket);
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);
    while (!stopping) {
      beast::flat_buffer in;
      ws.read(in, ec);
      if (ec) return;
      for (const json& out : manager.handle_text(beast::buffers_to_string(in.data()))) {
        ws.write(asio::buffer(out.dump()), ec);
        if (ec) return;
      }
    }
  }
};

Server::Server(SessionManager& manager, const std::string& address, std::uint16_t port)
    : impl_(std::make_unique<Impl>(manager, address, port)) {}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::start() {
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

void Server::run() { impl_->accept_loop(); }

void Server::stop() {
  if (impl_->stopping.exchange(true)) return;
  // Unblock the accept and every connection read at the OS level.
  ::shutdown(impl_->acceptor.native_handle(), SHUT_RDWR);
  if (impl_->accept_thread.joinable() &&
      impl_->accept_thread.get_id() != std::this_thread::get_id()) {
    impl_->accept_thread.join();
  }
  {
    std::lock_guard lock(impl_->conn_mutex);
    for (auto& c : impl_->connections) {
      if (!c.done) ::shutdown(c.fd, SHUT_RDWR);
    }
  }
  for (auto& c : impl_->connections) c.worker.join();
  impl_->connections.clear();
  beast::error_code ec;
  impl_->acceptor.close(ec);
}

}  // namespace safelife::play
