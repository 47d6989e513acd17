#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "swarmsim/simulator.hpp"

namespace swarmsim {

/// Ordered hand-off from the network layer to the simulation thread.
class CommandQueue {
 public:
  /// Returns the receipt index assigned to the command.
  std::uint64_t push(CommandPayload payload);
  std::vector<Command> drain();
  /// Blocks until a command arrives or `timeout` passes.
  void wait_for(std::chrono::duration<double> timeout);

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Command> pending_;
  std::uint64_t next_ = 0;
};

struct TranscriptEntry {
  std::uint64_t tick = 0;
  CommandPayload cmd;
};

/// World commands with the tick at which they took effect.
struct Transcript {
  std::uint64_t seed = 0;
  std::vector<TranscriptEntry> commands;
  std::uint64_t final_tick = 0;

  static Transcript load(const std::filesystem::path& path);
};

struct RunOptions {
  std::optional<std::uint64_t> max_steps;  ///< stop after this many ticks
  bool start_paused = false;
  std::function<void(const StateSnapshot&)> on_telemetry;
  const Transcript* replay = nullptr;      ///< apply these instead of queue world commands
  const std::atomic<bool>* stop = nullptr;
};

struct RunReport {
  std::uint64_t steps = 0;
  double sim_time = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t commands_applied = 0;
  std::uint64_t commands_rejected = 0;
};

/// Drives a Simulator: drains commands at tick boundaries, handles
/// pause/step/pacing, publishes telemetry. Pacing never touches the
/// simulated state, so logs do not depend on the realtime factor.
class Runner {
 public:
  Runner(Simulator& sim, CommandQueue& queue, RunOptions options);

  RunReport run();

 private:
  void handle(const Command& cmd);
  void publish();
  void reset_pacing();

  Simulator& sim_;
  CommandQueue& queue_;
  RunOptions opt_;
  bool paused_ = false;
  std::uint64_t step_budget_ = 0;
  std::int64_t telemetry_period_ = 0;
  std::chrono::steady_clock::time_point pace_anchor_;
  std::uint64_t pace_anchor_step_ = 0;
  std::size_t replay_next_ = 0;
  RunReport report_;
};

}  // namespace swarmsim
