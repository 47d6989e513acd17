#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "swarmsim/geometry.hpp"
#include "swarmsim/rigid_body.hpp"
#include "swarmsim/rotor_aero.hpp"
#include "swarmsim/vehicle.hpp"

namespace swarmsim {

enum class FlightMode { PositionHold, VelocityYaw, TakeOff, Land };

struct Setpoint {
  FlightMode mode = FlightMode::PositionHold;
  std::optional<Vec3> p_ref;      ///< PositionHold, TakeOff target, Land x-y hold
  std::optional<Vec3> v_ref;      ///< VelocityYaw; feedforward in PositionHold
  std::optional<double> yaw_ref;  ///< rad
  double yaw_rate_ref = 0.0;      ///< rad/s, VelocityYaw

  static Setpoint hold(const Vec3& p, std::optional<double> yaw = std::nullopt);
  static Setpoint velocity(const Vec3& v, double yaw_rate = 0.0);
  static Setpoint takeoff(const Vec3& target);
  static Setpoint land(std::optional<Vec3> xy_hold = std::nullopt);
};

/// Throws InvalidArgument when a field required by the mode is missing.
void validate(const Setpoint& sp);

struct PidGains {
  Vec3 kp = Vec3::Zero();
  Vec3 ki = Vec3::Zero();
  Vec3 kd = Vec3::Zero();
  Vec3 i_limit = Vec3::Constant(1.0);
  double output_limit = 1.0;
};

struct ControllerGains {
  Vec3 pos_kp{1.0, 1.0, 1.5};
  double max_speed_xy = 3.0;
  double max_speed_z = 1.5;
  PidGains vel;     ///< velocity error -> acceleration (m/s^2)
  double max_tilt = 0.6;
  Vec3 att_kp{8.0, 8.0, 4.0};
  double max_rate = 4.0;
  PidGains rate;    ///< body-rate error -> angular acceleration (rad/s^2)
  double takeoff_speed = 0.5;
  double land_speed = 0.5;

  /// Artifact-chosen gains for the default 1.5 kg quad.
  static ControllerGains defaults();
};

/// Throws InvalidArgument on negative gains or non-positive limits.
void validate(const ControllerGains& gains);

/// Integrator and held outer-loop output. The controller is otherwise
/// stateless: everything it remembers lives here.
struct ControllerState {
  Vec3 vel_integral = Vec3::Zero();
  Vec3 vel_prev_error = Vec3::Zero();
  bool vel_has_prev = false;
  Vec3 rate_integral = Vec3::Zero();
  Vec3 rate_prev_error = Vec3::Zero();
  bool rate_has_prev = false;
  std::optional<double> yaw_sp;
  bool saturated = false;

  double thrust = 0.0;         ///< collective thrust (N) held for the inner loop
  Vec3 rate_ref = Vec3::Zero();
  Vec3 vel_ref = Vec3::Zero(); ///< last velocity reference (world), for logging
  bool motors_off = false;
};

struct MotorCommand {
  std::vector<double> omega_cmd;
};

/// Control allocation over an arbitrary coplanar rotor layout.
class Mixer {
 public:
  /// Throws RankDeficientLayout when the layout cannot produce independent
  /// thrust, roll, pitch and yaw (fewer than 4 rotors or rank < 4).
  explicit Mixer(std::vector<RotorDef> layout);

  /// Squared speeds from the pseudo-inverse allocation, negative squares
  /// clamped to 0 and speeds saturated at omega_max.
  MotorCommand mix(double thrust, const Vec3& moments, bool* saturated = nullptr) const;

  /// Wrench (thrust, Mx, My, Mz) per unit squared speed, one column per rotor.
  const Eigen::Matrix<double, 4, Eigen::Dynamic>& allocation() const { return alloc_; }
  const std::vector<RotorDef>& layout() const { return layout_; }

 private:
  std::vector<RotorDef> layout_;
  Eigen::Matrix<double, 4, Eigen::Dynamic> alloc_;
  Eigen::Matrix<double, Eigen::Dynamic, 4> pinv_;
};

MotorCommand mix(double thrust, const Vec3& moments, const std::vector<RotorDef>& layout);

/// Position/velocity/attitude loops: produces collective thrust and a body
/// rate reference, stored in `state`.
void outer_loop_step(const RigidBodyState& s, const Setpoint& sp, const ControllerGains& gains,
                     const VehicleParams& vehicle, double dt, ControllerState& state);

/// Rate loop and mixing using the thrust and rate reference held in `state`.
MotorCommand inner_loop_step(const RigidBodyState& s, const ControllerGains& gains,
                             const VehicleParams& vehicle, const Mixer& mixer, double dt,
                             ControllerState& state);

struct ControlOutput {
  MotorCommand command;
  ControllerState state;
};

/// Full cascade at a single rate.
ControlOutput control_step(const RigidBodyState& s, const Setpoint& sp,
                           const ControllerGains& gains, const VehicleParams& vehicle, double dt,
                           ControllerState state, const Mixer& mixer);

}  // namespace swarmsim
