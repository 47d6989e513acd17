#include "swarmsim/clock.hpp"

#include <cmath>
#include <numeric>

#include "swarmsim/error.hpp"

namespace swarmsim {

Rational Rational::from_seconds(double seconds) {
  if (!(seconds > 0.0) || !std::isfinite(seconds)) {
    throw Error(ErrorKind::ConfigError, "time step must be positive and finite");
  }
  // Continued-fraction convergents of `seconds`.
  constexpr std::int64_t kMaxDen = 1'000'000'000;
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = seconds;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_f = std::floor(x);
    if (a_f > 1e15) {
      break;
    }
    const auto a = static_cast<std::int64_t>(a_f);
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > kMaxDen) {
      break;
    }
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (static_cast<double>(h1) / static_cast<double>(k1) == seconds) {
      const std::int64_t g = std::gcd(h1, k1);
      return {h1 / g, k1 / g};
    }
    const double frac = x - a_f;
    if (frac == 0.0) {
      break;
    }
    x = 1.0 / frac;
  }
  throw Error(ErrorKind::ConfigError, "time step is not a fraction with denominator <= 1e9");
}

std::optional<std::int64_t> steps_per_period(const Rational& dt, double rate_hz) {
  if (!(rate_hz > 0.0) || std::floor(rate_hz) != rate_hz) {
    return std::nullopt;
  }
  // period / dt = den / (num * rate)
  const auto rate = static_cast<std::int64_t>(rate_hz);
  const std::int64_t divisor = dt.num * rate;
  if (divisor <= 0 || dt.den % divisor != 0) {
    return std::nullopt;
  }
  return dt.den / divisor;
}

SimClock::SimClock(Rational dt, std::optional<double> realtime_factor) : dt_(dt) {
  if (dt_.num <= 0 || dt_.den <= 0) {
    throw Error(ErrorKind::ConfigError, "dt must be positive");
  }
  set_realtime_factor(realtime_factor);
}

double SimClock::t() const {
  return static_cast<double>(static_cast<std::int64_t>(step_index_) * dt_.num) /
         static_cast<double>(dt_.den);
}

void SimClock::set_realtime_factor(std::optional<double> factor) {
  if (factor && !(*factor > 0.0 && std::isfinite(*factor))) {
    factor.reset();
  }
  realtime_factor_ = factor;
}

double SimClock::advised_delay() const {
  return realtime_factor_ ? dt_.value() / *realtime_factor_ : 0.0;
}

double SimClock::advance() {
  ++step_index_;
  return advised_delay();
}

}  // namespace swarmsim
