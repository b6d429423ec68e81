#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "vlp/scene.hpp"

namespace vlp {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
};

/// Parses "host:port" or ":port". Throws Error(kValidation).
Endpoint parse_endpoint(const std::string& text);

struct ServerOptions {
  Endpoint tcp{"127.0.0.1", 7700};
  // Browser endpoint: HTTP for static assets plus a WebSocket at /ws.
  Endpoint http{"127.0.0.1", 7701};
  bool headless = false;
  std::filesystem::path static_dir;  // empty: built-in placeholder page
  double speed = 1.0;                // 1 = real time; <= 0 runs unpaced
  std::int64_t max_ticks = 0;        // 0 = run until stop()
  bool include_truth = false;        // ground truth in snapshots (debug overlay)
};

/// Runs the simulation on its own thread and fans messages out to clients.
/// Connection handlers only exchange queued messages with the sim thread.
class Server {
 public:
  Server(Scenario scenario, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds both endpoints and starts the io and sim threads. Throws Error(kBind).
  void start();
  /// Stops both threads; idempotent.
  void stop();
  /// Blocks until the sim thread finishes (max_ticks reached or stop()).
  void wait();

  std::uint16_t tcp_port() const;
  std::uint16_t http_port() const;
  std::int64_t ticks_run() const;
  std::size_t client_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vlp
