#pragma once

#include <array>
#include <cstdint>

namespace swarmsim {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Bit-compatible with the Random123 reference.
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Independent random stream keyed by (seed, stream_id).
///
/// Block k of the stream is philox4x32_10({k_lo, k_hi, id_lo, id_hi},
/// {seed_lo, seed_hi}). Each block yields two 64-bit words (word0 = w1<<32|w0,
/// word1 = w3<<32|w2). uniform() = (word >> 11) * 2^-53. normal() is
/// Box-Muller over two uniforms u1, u2: r = sqrt(-2 ln(1 - u1)),
/// returns r cos(2 pi u2) and caches r sin(2 pi u2) for the next call.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double uniform();
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  PhiloxKey key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream id for a vehicle's sensor, so adding a sensor never shifts the
/// draws of another.
constexpr std::uint64_t sensor_stream_id(std::uint64_t vehicle_id, std::uint64_t sensor_index) {
  return vehicle_id * 64 + sensor_index;
}

}  // namespace swarmsim
