#include "swarmsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "swarmsim/error.hpp"
#include "swarmsim/protocol.hpp"

namespace swarmsim {

std::uint64_t CommandQueue::push(CommandPayload payload) {
  std::uint64_t index = 0;
  {
    std::lock_guard lock(mu_);
    index = next_++;
    pending_.push_back({index, std::move(payload)});
  }
  cv_.notify_one();
  return index;
}

std::vector<Command> CommandQueue::drain() {
  std::lock_guard lock(mu_);
  std::vector<Command> out(std::make_move_iterator(pending_.begin()),
                           std::make_move_iterator(pending_.end()));
  pending_.clear();
  return out;
}

void CommandQueue::wait_for(std::chrono::duration<double> timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !pending_.empty(); });
}

Transcript Transcript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open transcript " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
    Transcript t;
    t.seed = j.at("seed").get<std::uint64_t>();
    t.final_tick = j.at("final_tick").get<std::uint64_t>();
    for (const auto& entry : j.at("commands")) {
      t.commands.push_back({entry.at("tick").get<std::uint64_t>(), parse_command(entry.at("cmd"))});
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

Runner::Runner(Simulator& sim, CommandQueue& queue, RunOptions options)
    : sim_(sim), queue_(queue), opt_(std::move(options)) {
  const double hz = sim_.config().rates.telemetry;
  if (hz > 0.0) {
    telemetry_period_ =
        std::max<std::int64_t>(1, std::llround(1.0 / (hz * sim_.config().dt.value())));
  }
}

void Runner::reset_pacing() {
  pace_anchor_ = std::chrono::steady_clock::now();
  pace_anchor_step_ = sim_.step_index();
}

void Runner::publish() {
  if (opt_.on_telemetry) {
    StateSnapshot s = sim_.snapshot();
    s.paused = paused_ && step_budget_ == 0;
    opt_.on_telemetry(s);
  }
}

void Runner::handle(const Command& cmd) {
  const CommandPayload& p = cmd.payload;
  if (std::holds_alternative<PauseCmd>(p)) {
    paused_ = true;
    step_budget_ = 0;
  } else if (std::holds_alternative<ResumeCmd>(p)) {
    paused_ = false;
    step_budget_ = 0;
    reset_pacing();
  } else if (const auto* s = std::get_if<StepCmd>(&p)) {
    paused_ = true;
    step_budget_ += static_cast<std::uint64_t>(s->n);
    reset_pacing();
  } else if (const auto* r = std::get_if<SetRtfCmd>(&p)) {
    sim_.clock().set_realtime_factor(r->factor);
    reset_pacing();
  } else {
    try {
      sim_.apply(p);
      ++report_.commands_applied;
    } catch (const Error&) {
      ++report_.commands_rejected;
    }
  }
}

RunReport Runner::run() {
  using clock = std::chrono::steady_clock;
  const auto wall_start = clock::now();
  paused_ = opt_.start_paused;
  reset_pacing();
  publish();
  auto last_idle_publish = clock::now();
  const double hz = sim_.config().rates.telemetry;
  const std::chrono::duration<double> idle_period(hz > 0.0 ? 1.0 / hz : 0.1);
  std::optional<std::uint64_t> max_steps = opt_.max_steps;
  if (opt_.replay != nullptr && !max_steps) {
    max_steps = opt_.replay->final_tick;
  }

  while (opt_.stop == nullptr || !opt_.stop->load()) {
    for (const Command& c : queue_.drain()) {
      handle(c);
    }
    if (opt_.replay != nullptr) {
      const auto& cmds = opt_.replay->commands;
      while (replay_next_ < cmds.size() && cmds[replay_next_].tick <= sim_.step_index()) {
        sim_.apply(cmds[replay_next_].cmd);
        ++report_.commands_applied;
        ++replay_next_;
      }
    }
    if (max_steps && report_.steps >= *max_steps) {
      break;
    }
    if (paused_ && step_budget_ == 0) {
      if (clock::now() - last_idle_publish >= idle_period) {
        publish();
        last_idle_publish = clock::now();
      }
      queue_.wait_for(std::min(idle_period, std::chrono::duration<double>(0.02)));
      continue;
    }

    sim_.step();
    ++report_.steps;
    if (step_budget_ > 0 && --step_budget_ == 0) {
      publish();
      last_idle_publish = clock::now();
    } else if (telemetry_period_ > 0 &&
               sim_.step_index() % static_cast<std::uint64_t>(telemetry_period_) == 0) {
      publish();
    }

    if (const auto rtf = sim_.clock().realtime_factor(); rtf && !paused_) {
      const double ahead = static_cast<double>(sim_.step_index() - pace_anchor_step_) *
                           sim_.clock().dt() / *rtf;
      const auto target = pace_anchor_ + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double>(ahead));
      if (target > clock::now()) {
        std::this_thread::sleep_until(target);
      }
    }
  }
  report_.sim_time = sim_.t();
  report_.wall_seconds = std::chrono::duration<double>(clock::now() - wall_start).count();
  return report_;
}

}  // namespace swarmsim
