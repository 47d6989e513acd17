#include "swarmsim/sensors.hpp"

#include <cmath>

#include "swarmsim/error.hpp"

namespace swarmsim {

void validate(const AxisNoiseSpec& spec) {
  if (spec.noise_density < 0.0 || spec.random_walk < 0.0 || spec.turn_on_bias_sigma < 0.0 ||
      !(spec.bias_corr_time > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "noise parameters must be >= 0 and bias_corr_time > 0 (or inf)");
  }
}

BiasState init_bias(const AxisNoiseSpec& spec, RngStream& rng) {
  if (spec.turn_on_bias_sigma == 0.0) {
    return {};
  }
  return {spec.turn_on_bias_sigma * rng.normal()};
}

Measurement sample(double truth, BiasState bias, const AxisNoiseSpec& spec, double dt,
                   RngStream& rng) {
  double n = 0.0;
  if (spec.noise_density != 0.0) {
    n = spec.noise_density / std::sqrt(dt) * rng.normal();
  }
  double b = bias.b;
  if (std::isfinite(spec.bias_corr_time)) {
    b *= std::exp(-dt / spec.bias_corr_time);
  }
  if (spec.random_walk != 0.0) {
    b += spec.random_walk * std::sqrt(dt) * rng.normal();
  }
  return {truth + b + n, {b}};
}

ImuTruth imu_truth(const RigidBodyState& s, const Vec3& a_world, double g) {
  ImuTruth out;
  out.gyro_body = s.omega;
  out.accel_body = rotate_inverse(s.q, a_world - Vec3(0.0, 0.0, -g));
  return out;
}

AuxTruth mag_baro_gps_truth(const RigidBodyState& s, const Vec3& field_world, const Vec3& p0) {
  AuxTruth out;
  out.mag_body = rotate_inverse(s.q, field_world);
  out.altitude = s.p.z() - p0.z();
  out.gps_pos = s.p;
  out.gps_vel = s.v;
  return out;
}

Vec3 magnetic_field_enu(double declination, double inclination) {
  const double horizontal = std::cos(inclination);
  return {horizontal * std::sin(declination), horizontal * std::cos(declination),
          -std::sin(inclination)};
}

}  // namespace swarmsim
