#pragma once

#include <cstdint>
#include <optional>

namespace swarmsim {

/// Exact step length num/den seconds.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1000;

  /// Recovers the shortest fraction (denominator <= 1e9) whose double value
  /// equals `seconds`; throws ConfigError if none exists or seconds <= 0.
  static Rational from_seconds(double seconds);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

/// Number of physics steps per period of a subsystem running at `rate_hz`,
/// or nullopt when the rate does not divide the physics rate evenly.
std::optional<std::int64_t> steps_per_period(const Rational& dt, double rate_hz);

/// Lockstep clock. Time is derived from the step index, never accumulated.
class SimClock {
 public:
  /// realtime_factor <= 0 or nullopt means unbounded.
  explicit SimClock(Rational dt, std::optional<double> realtime_factor = std::nullopt);

  std::uint64_t step_index() const { return step_index_; }
  double t() const;
  double dt() const { return dt_.value(); }
  const Rational& dt_exact() const { return dt_; }
  std::optional<double> realtime_factor() const { return realtime_factor_; }
  void set_realtime_factor(std::optional<double> factor);

  /// Advances one step. Returns the advisory wall-clock delay (s) between
  /// steps for the configured realtime factor; 0 when unbounded.
  double advance();

  /// Advisory inter-step wall delay without advancing.
  double advised_delay() const;

 private:
  Rational dt_;
  std::uint64_t step_index_ = 0;
  std::optional<double> realtime_factor_;
};

}  // namespace swarmsim
