#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "swarmsim/protocol.hpp"
#include "swarmsim/simulator.hpp"

namespace swarmsim {

/// WebSocket endpoint for telemetry and commands, plus optional static
/// file serving for a browser client. Runs its own I/O thread; talks to
/// the simulation only through the command sink and broadcast().
class TelemetryServer {
 public:
  struct Options {
    std::string address = "127.0.0.1";
    int port = 0;  ///< 0 picks a free port
    std::optional<std::filesystem::path> ui_dir;
  };

  using CommandSink = std::function<void(CommandPayload)>;

  TelemetryServer(Options options, Roster roster, CommandSink sink);
  ~TelemetryServer();

  TelemetryServer(const TelemetryServer&) = delete;
  TelemetryServer& operator=(const TelemetryServer&) = delete;

  /// Binds and starts serving. Throws BindError if the port is taken.
  void start();
  void stop();

  /// Bound port (valid after start()).
  int port() const;

  /// Sends the frame to every connected client. Thread-safe.
  void broadcast(const StateSnapshot& snapshot);
  void broadcast_text(std::string frame);

  std::size_t client_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Minimal synchronous WebSocket client, used by tests and scripts.
class ProtocolClient {
 public:
  ProtocolClient(const std::string& host, int port);
  ~ProtocolClient();

  void send(const std::string& text);
  /// Blocks for the next text frame; nullopt on timeout.
  std::optional<std::string> receive(double timeout_seconds = 5.0);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace swarmsim
