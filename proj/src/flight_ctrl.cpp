#include "swarmsim/flight_ctrl.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "swarmsim/error.hpp"

namespace swarmsim {

Setpoint Setpoint::hold(const Vec3& p, std::optional<double> yaw) {
  Setpoint sp;
  sp.mode = FlightMode::PositionHold;
  sp.p_ref = p;
  sp.yaw_ref = yaw;
  return sp;
}

Setpoint Setpoint::velocity(const Vec3& v, double yaw_rate) {
  Setpoint sp;
  sp.mode = FlightMode::VelocityYaw;
  sp.v_ref = v;
  sp.yaw_rate_ref = yaw_rate;
  return sp;
}

Setpoint Setpoint::takeoff(const Vec3& target) {
  Setpoint sp;
  sp.mode = FlightMode::TakeOff;
  sp.p_ref = target;
  return sp;
}

Setpoint Setpoint::land(std::optional<Vec3> xy_hold) {
  Setpoint sp;
  sp.mode = FlightMode::Land;
  sp.p_ref = xy_hold;
  return sp;
}

void validate(const Setpoint& sp) {
  switch (sp.mode) {
    case FlightMode::PositionHold:
    case FlightMode::TakeOff:
      if (!sp.p_ref) {
        throw Error(ErrorKind::InvalidArgument, "setpoint mode requires p_ref");
      }
      break;
    case FlightMode::VelocityYaw:
      if (!sp.v_ref) {
        throw Error(ErrorKind::InvalidArgument, "VelocityYaw requires v_ref");
      }
      break;
    case FlightMode::Land:
      break;
  }
}

ControllerGains ControllerGains::defaults() {
  ControllerGains g;
  g.vel.kp = Vec3(3.0, 3.0, 4.0);
  g.vel.ki = Vec3(0.4, 0.4, 1.0);
  g.vel.kd = Vec3(0.0, 0.0, 0.0);
  g.vel.i_limit = Vec3(2.0, 2.0, 2.0);
  g.vel.output_limit = 6.0;
  g.rate.kp = Vec3(25.0, 25.0, 10.0);
  g.rate.ki = Vec3(5.0, 5.0, 2.0);
  g.rate.kd = Vec3(0.2, 0.2, 0.0);
  g.rate.i_limit = Vec3(0.5, 0.5, 0.5);
  g.rate.output_limit = 200.0;
  return g;
}

namespace {

void validate_pid(const PidGains& g) {
  if ((g.kp.array() < 0.0).any() || (g.ki.array() < 0.0).any() || (g.kd.array() < 0.0).any() ||
      !(g.i_limit.array() > 0.0).all() || !(g.output_limit > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "PID gains must be >= 0 and limits > 0");
  }
}

Vec3 clamp_abs(const Vec3& v, const Vec3& limit) {
  return v.cwiseMax(-limit).cwiseMin(limit);
}

Vec3 clamp_norm(const Vec3& v, double limit) {
  const double n = v.norm();
  return n > limit ? Vec3(v * (limit / n)) : v;
}

// One PID update. Integration is skipped while the actuators saturate.
Vec3 pid_update(const PidGains& g, const Vec3& error, double dt, bool freeze, Vec3& integral,
                Vec3& prev_error, bool& has_prev) {
  if (!freeze) {
    integral = clamp_abs(integral + error * dt, g.i_limit);
  }
  Vec3 derivative = Vec3::Zero();
  if (has_prev) {
    derivative = (error - prev_error) / dt;
  }
  prev_error = error;
  has_prev = true;
  return g.kp.cwiseProduct(error) + g.ki.cwiseProduct(integral) + g.kd.cwiseProduct(derivative);
}

double wrap_pi(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

void validate(const ControllerGains& gains) {
  validate_pid(gains.vel);
  validate_pid(gains.rate);
  if ((gains.pos_kp.array() < 0.0).any() || (gains.att_kp.array() < 0.0).any() ||
      !(gains.max_speed_xy > 0.0) || !(gains.max_speed_z > 0.0) || !(gains.max_tilt > 0.0) ||
      !(gains.max_rate > 0.0) || !(gains.takeoff_speed > 0.0) || !(gains.land_speed > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "controller gains must be >= 0 and limits > 0");
  }
}

Mixer::Mixer(std::vector<RotorDef> layout) : layout_(std::move(layout)) {
  const auto n = static_cast<Eigen::Index>(layout_.size());
  if (n < 4) {
    throw Error(ErrorKind::RankDeficientLayout, "need at least 4 rotors");
  }
  alloc_.resize(4, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RotorDef& r = layout_[static_cast<std::size_t>(i)];
    const double ct = r.coeffs.C_T;
    alloc_(0, i) = ct;
    alloc_(1, i) = r.r.y() * ct;
    alloc_(2, i) = -r.r.x() * ct;
    alloc_(3, i) = -r.zeta * r.coeffs.C_M * ct;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(alloc_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() < 4 || !(sv(3) > 1e-9 * sv(0))) {
    throw Error(ErrorKind::RankDeficientLayout, "rotor layout does not span thrust and 3 moments");
  }
  pinv_ = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

MotorCommand Mixer::mix(double thrust, const Vec3& moments, bool* saturated) const {
  Eigen::Vector4d wrench(thrust, moments.x(), moments.y(), moments.z());
  const Eigen::VectorXd omega_sq = pinv_ * wrench;
  MotorCommand cmd;
  cmd.omega_cmd.resize(layout_.size());
  bool sat = false;
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    double w2 = omega_sq(static_cast<Eigen::Index>(i));
    if (w2 < 0.0) {
      w2 = 0.0;
      sat = true;
    }
    double w = std::sqrt(w2);
    if (w > layout_[i].omega_max) {
      w = layout_[i].omega_max;
      sat = true;
    }
    cmd.omega_cmd[i] = w;
  }
  if (saturated != nullptr) {
    *saturated = sat;
  }
  return cmd;
}

MotorCommand mix(double thrust, const Vec3& moments, const std::vector<RotorDef>& layout) {
  return Mixer(layout).mix(thrust, moments);
}

void outer_loop_step(const RigidBodyState& s, const Setpoint& sp, const ControllerGains& gains,
                     const VehicleParams& vehicle, double dt, ControllerState& state) {
  const double mass = vehicle.mass_props.mass();
  const double g = vehicle.gravity;
  if (!state.yaw_sp) {
    state.yaw_sp = s.q.yaw();
  }
  double yaw_rate_ff = 0.0;
  state.motors_off = false;

  Vec3 v_des = Vec3::Zero();
  auto position_velocity = [&](const Vec3& p_ref) {
    Vec3 v = gains.pos_kp.cwiseProduct(p_ref - s.p);
    return v;
  };
  auto limit_speed = [&](Vec3 v) {
    const Eigen::Vector2d xy = clamp_norm(Vec3(v.x(), v.y(), 0.0), gains.max_speed_xy).head<2>();
    v.head<2>() = xy;
    v.z() = std::clamp(v.z(), -gains.max_speed_z, gains.max_speed_z);
    return v;
  };

  switch (sp.mode) {
    case FlightMode::PositionHold: {
      v_des = position_velocity(*sp.p_ref);
      if (sp.v_ref) {
        v_des += *sp.v_ref;
      }
      v_des = limit_speed(v_des);
      if (sp.yaw_ref) {
        state.yaw_sp = *sp.yaw_ref;
      }
      break;
    }
    case FlightMode::VelocityYaw: {
      v_des = limit_speed(*sp.v_ref);
      yaw_rate_ff = sp.yaw_rate_ref;
      state.yaw_sp = wrap_pi(*state.yaw_sp + yaw_rate_ff * dt);
      break;
    }
    case FlightMode::TakeOff: {
      v_des = limit_speed(position_velocity(*sp.p_ref));
      v_des.z() = std::clamp(v_des.z(), -gains.takeoff_speed, gains.takeoff_speed);
      break;
    }
    case FlightMode::Land: {
      if (sp.p_ref) {
        v_des = limit_speed(position_velocity(*sp.p_ref));
      }
      v_des.z() = -gains.land_speed;
      if (s.p.z() <= 1e-3 && s.v.norm() <= 1e-6) {
        state = ControllerState{};
        state.yaw_sp = s.q.yaw();
        state.motors_off = true;
        return;
      }
      break;
    }
  }
  state.vel_ref = v_des;

  Vec3 a_des = pid_update(gains.vel, v_des - s.v, dt, state.saturated, state.vel_integral,
                          state.vel_prev_error, state.vel_has_prev);
  a_des = clamp_norm(a_des, gains.vel.output_limit);

  // Desired force with tilt limit; keep at least a fraction of weight upward.
  Vec3 f_des = mass * (a_des + Vec3(0.0, 0.0, g));
  f_des.z() = std::max(f_des.z(), 0.2 * mass * g);
  const double max_horizontal = f_des.z() * std::tan(gains.max_tilt);
  const Vec3 f_xy = clamp_norm(Vec3(f_des.x(), f_des.y(), 0.0), max_horizontal);
  f_des.x() = f_xy.x();
  f_des.y() = f_xy.y();

  const Vec3 z_des = f_des.normalized();
  const double yaw = *state.yaw_sp;
  const Vec3 x_course(std::cos(yaw), std::sin(yaw), 0.0);
  const Vec3 y_des = z_des.cross(x_course).normalized();
  const Vec3 x_des = y_des.cross(z_des);
  Mat3 r_des;
  r_des.col(0) = x_des;
  r_des.col(1) = y_des;
  r_des.col(2) = z_des;
  const UnitQuat q_des = UnitQuat::from_matrix(r_des);

  const Vec3 z_body = rotate(s.q, Vec3::UnitZ());
  state.thrust = std::max(0.0, f_des.dot(z_body));

  UnitQuat q_err = s.q.conjugate() * q_des;
  const double sign = q_err.w() < 0.0 ? -1.0 : 1.0;
  Vec3 rate_ref = 2.0 * sign * gains.att_kp.cwiseProduct(q_err.vec());
  rate_ref += rotate_inverse(s.q, Vec3(0.0, 0.0, yaw_rate_ff));
  state.rate_ref = clamp_abs(rate_ref, Vec3::Constant(gains.max_rate));
}

MotorCommand inner_loop_step(const RigidBodyState& s, const ControllerGains& gains,
                             const VehicleParams& vehicle, const Mixer& mixer, double dt,
                             ControllerState& state) {
  if (state.motors_off) {
    return {std::vector<double>(mixer.layout().size(), 0.0)};
  }
  Vec3 alpha = pid_update(gains.rate, state.rate_ref - s.omega, dt, state.saturated,
                          state.rate_integral, state.rate_prev_error, state.rate_has_prev);
  alpha = clamp_abs(alpha, Vec3::Constant(gains.rate.output_limit));
  const Mat3& J = vehicle.mass_props.inertia();
  const Vec3 moments = J * alpha + s.omega.cross(J * s.omega);
  bool saturated = false;
  MotorCommand cmd = mixer.mix(state.thrust, moments, &saturated);
  state.saturated = saturated;
  return cmd;
}

ControlOutput control_step(const RigidBodyState& s, const Setpoint& sp,
                           const ControllerGains& gains, const VehicleParams& vehicle, double dt,
                           ControllerState state, const Mixer& mixer) {
  outer_loop_step(s, sp, gains, vehicle, dt, state);
  MotorCommand cmd = inner_loop_step(s, gains, vehicle, mixer, dt, state);
  return {std::move(cmd), std::move(state)};
}

}  // namespace swarmsim
