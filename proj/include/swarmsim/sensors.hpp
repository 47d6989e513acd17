#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "swarmsim/geometry.hpp"
#include "swarmsim/rigid_body.hpp"
#include "swarmsim/rng.hpp"

namespace swarmsim {

/// Per-axis noise parameters, datasheet semantics.
struct AxisNoiseSpec {
  double noise_density = 0.0;       ///< white noise, unit/sqrt(Hz)
  double random_walk = 0.0;         ///< bias driving noise, unit/s/sqrt(Hz)
  double bias_corr_time = std::numeric_limits<double>::infinity();  ///< s
  double turn_on_bias_sigma = 0.0;  ///< unit

  bool is_noiseless() const {
    return noise_density == 0.0 && random_walk == 0.0 && turn_on_bias_sigma == 0.0;
  }
};

/// Throws InvalidArgument if any field is negative or bias_corr_time <= 0.
void validate(const AxisNoiseSpec& spec);

struct BiasState {
  double b = 0.0;
};

struct Measurement {
  double measured = 0.0;
  BiasState bias;
};

BiasState init_bias(const AxisNoiseSpec& spec, RngStream& rng);

/// x_m = x + b' + n, with
///   n  = noise_density / sqrt(dt) * w1
///   b' = exp(-dt/tau) b + random_walk * sqrt(dt) * w2
/// Draw order: w1 then w2. Zero-valued terms consume no draws, so noiseless
/// axes leave the stream untouched.
Measurement sample(double truth, BiasState bias, const AxisNoiseSpec& spec, double dt,
                   RngStream& rng);

/// Independent axes sharing one stream, drawn in x, y, z order.
template <std::size_t N>
struct NoisyChannel {
  std::array<AxisNoiseSpec, N> spec{};
  std::array<BiasState, N> bias{};

  void init(RngStream& rng) {
    for (std::size_t i = 0; i < N; ++i) {
      bias[i] = init_bias(spec[i], rng);
    }
  }

  std::array<double, N> measure(const std::array<double, N>& truth, double dt, RngStream& rng) {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      const Measurement m = sample(truth[i], bias[i], spec[i], dt, rng);
      bias[i] = m.bias;
      out[i] = m.measured;
    }
    return out;
  }
};

struct ImuTruth {
  Vec3 accel_body = Vec3::Zero();  ///< specific force (m/s^2)
  Vec3 gyro_body = Vec3::Zero();   ///< rad/s
};

/// Specific force convention: at rest the accelerometer reads +g up.
ImuTruth imu_truth(const RigidBodyState& s, const Vec3& a_world, double g = kDefaultGravity);

struct AuxTruth {
  Vec3 mag_body = Vec3::Zero();
  double altitude = 0.0;
  Vec3 gps_pos = Vec3::Zero();
  Vec3 gps_vel = Vec3::Zero();
};

AuxTruth mag_baro_gps_truth(const RigidBodyState& s, const Vec3& field_world, const Vec3& p0);

/// Unit Earth-field direction in ENU from declination (east of north) and
/// inclination (below horizontal), radians.
Vec3 magnetic_field_enu(double declination, double inclination);

/// Fixed sensor indices used in stream derivation.
enum class SensorIndex : std::uint64_t {
  Accel = 0,
  Gyro = 1,
  Mag = 2,
  Baro = 3,
  GpsPos = 4,
  GpsVel = 5,
  Camera = 6,
};

struct SensorRates {
  double imu = 250.0;
  double mag = 50.0;
  double baro = 50.0;
  double gps = 10.0;
  double camera = 20.0;
};

/// Noise specs and bias state of every sensor on one vehicle.
struct SensorRig {
  NoisyChannel<3> accel;
  NoisyChannel<3> gyro;
  NoisyChannel<3> mag;
  NoisyChannel<1> baro;
  NoisyChannel<3> gps_pos;
  NoisyChannel<3> gps_vel;
  SensorRates rates;
};

}  // namespace swarmsim
