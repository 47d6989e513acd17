#include "swarmsim/geometry.hpp"

#include <cmath>

namespace swarmsim {

UnitQuat::UnitQuat(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    return;
  }
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
}

UnitQuat UnitQuat::from_axis_angle(const Vec3& axis, double angle_rad) {
  const double n = axis.norm();
  if (n == 0.0) {
    return {};
  }
  const double s = std::sin(0.5 * angle_rad) / n;
  return {std::cos(0.5 * angle_rad), axis.x() * s, axis.y() * s, axis.z() * s};
}

UnitQuat UnitQuat::from_yaw(double yaw_rad) {
  return {std::cos(0.5 * yaw_rad), 0.0, 0.0, std::sin(0.5 * yaw_rad)};
}

UnitQuat UnitQuat::from_matrix(const Mat3& r) {
  // Shepperd's method: pivot on the largest diagonal combination.
  const double tr = r.trace();
  double w, x, y, z;
  if (tr > r(0, 0) && tr > r(1, 1) && tr > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    w = 0.25 * s;
    x = (r(2, 1) - r(1, 2)) / s;
    y = (r(0, 2) - r(2, 0)) / s;
    z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    w = (r(2, 1) - r(1, 2)) / s;
    x = 0.25 * s;
    y = (r(0, 1) + r(1, 0)) / s;
    z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    w = (r(0, 2) - r(2, 0)) / s;
    x = (r(0, 1) + r(1, 0)) / s;
    y = 0.25 * s;
    z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    w = (r(1, 0) - r(0, 1)) / s;
    x = (r(0, 2) + r(2, 0)) / s;
    y = (r(1, 2) + r(2, 1)) / s;
    z = 0.25 * s;
  }
  return {w, x, y, z};
}

UnitQuat UnitQuat::conjugate() const {
  UnitQuat c;
  c.w_ = w_;
  c.x_ = -x_;
  c.y_ = -y_;
  c.z_ = -z_;
  return c;
}

UnitQuat UnitQuat::operator*(const UnitQuat& b) const {
  // Paired terms cancel exactly for q.conjugate() * q.
  return {w_ * b.w_ - x_ * b.x_ - y_ * b.y_ - z_ * b.z_,
          (w_ * b.x_ + x_ * b.w_) + (y_ * b.z_ - z_ * b.y_),
          (w_ * b.y_ + y_ * b.w_) + (z_ * b.x_ - x_ * b.z_),
          (w_ * b.z_ + z_ * b.w_) + (x_ * b.y_ - y_ * b.x_)};
}

Mat3 UnitQuat::to_matrix() const {
  Mat3 r;
  const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  r << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
      2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
      2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return r;
}

double UnitQuat::yaw() const {
  return std::atan2(2.0 * (w_ * z_ + x_ * y_), 1.0 - 2.0 * (y_ * y_ + z_ * z_));
}

Vec3 rotate(const UnitQuat& q, const Vec3& v) {
  // v' = v + 2w (u x v) + 2 u x (u x v)
  const Vec3 u = q.vec();
  const Vec3 t = 2.0 * u.cross(v);
  return v + q.w() * t + u.cross(t);
}

Vec3 rotate_inverse(const UnitQuat& q, const Vec3& v) { return rotate(q.conjugate(), v); }

UnitQuat quat_integrate(const UnitQuat& q, const Vec3& omega_body, double dt) {
  const double rate = omega_body.norm();
  const double half = 0.5 * rate * dt;
  // sin(half)/rate, with a series fallback near zero.
  double k;
  if (half < 1e-6) {
    k = 0.5 * dt * (1.0 - half * half / 6.0);
  } else {
    k = std::sin(half) / rate;
  }
  const UnitQuat dq(std::cos(half), omega_body.x() * k, omega_body.y() * k, omega_body.z() * k);
  return q * dq;
}

double rotation_angle(const UnitQuat& q) {
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.t = b.t;
  out.p = a.p + rotate(a.q, b.p);
  out.q = a.q * b.q;
  return out;
}

Pose inverse(const Pose& a) {
  Pose out;
  out.t = a.t;
  out.q = a.q.conjugate();
  out.p = -rotate(out.q, a.p);
  return out;
}

}  // namespace swarmsim
