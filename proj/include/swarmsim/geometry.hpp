#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace swarmsim {

// World frame is ENU (x east, y north, z up); body frame is FLU (x forward,
// y left, z up). Gravity is (0, 0, -g) and rotor thrust acts along +z_body.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Scalar-first unit quaternion. Every constructor and every operation that
/// produces a new attitude renormalizes, so ||q|| = 1 within 1e-9 holds.
class UnitQuat {
 public:
  UnitQuat() = default;
  /// Normalizes (w, x, y, z). A zero quaternion is mapped to identity.
  UnitQuat(double w, double x, double y, double z);

  static UnitQuat identity() { return {}; }
  static UnitQuat from_axis_angle(const Vec3& axis, double angle_rad);
  static UnitQuat from_yaw(double yaw_rad);
  /// Rotation matrix must be proper orthonormal.
  static UnitQuat from_matrix(const Mat3& r);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  Vec3 vec() const { return {x_, y_, z_}; }

  UnitQuat conjugate() const;
  UnitQuat operator*(const UnitQuat& rhs) const;
  Mat3 to_matrix() const;
  double yaw() const;

  bool operator==(const UnitQuat&) const = default;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// v expressed in the parent frame (body -> world for an attitude).
Vec3 rotate(const UnitQuat& q, const Vec3& v);

/// Inverse rotation, parent -> child.
Vec3 rotate_inverse(const UnitQuat& q, const Vec3& v);

/// Advances attitude by a body-frame angular velocity held constant over dt,
/// using the exponential map q' = q * exp(omega * dt / 2).
UnitQuat quat_integrate(const UnitQuat& q, const Vec3& omega_body, double dt);

/// Rotation angle of a relative rotation, in [0, pi].
double rotation_angle(const UnitQuat& q);

struct Pose {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  UnitQuat q;
};

/// Rigid-body composition a * b and inverse, ignoring the timestamp.
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& a);

}  // namespace swarmsim
