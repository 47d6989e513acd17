#pragma once

#include "swarmsim/geometry.hpp"

namespace swarmsim {

inline constexpr double kDefaultGravity = 9.81;

struct RigidBodyState {
  Vec3 p = Vec3::Zero();      ///< world position (m)
  Vec3 v = Vec3::Zero();      ///< world velocity (m/s)
  UnitQuat q;                 ///< body -> world
  Vec3 omega = Vec3::Zero();  ///< body angular velocity (rad/s)

  bool operator==(const RigidBodyState& o) const {
    return p == o.p && v == o.v && q == o.q && omega == o.omega;
  }
};

/// Mass and inertia. The constructor rejects non-positive mass and inertia
/// that is not symmetric positive-definite (SingularInertia).
class MassProperties {
 public:
  MassProperties(double mass, const Mat3& inertia);

  double mass() const { return mass_; }
  const Mat3& inertia() const { return inertia_; }
  const Mat3& inertia_inv() const { return inertia_inv_; }

 private:
  double mass_;
  Mat3 inertia_;
  Mat3 inertia_inv_;
};

/// Quadratic fuselage drag, disabled by default.
struct DragModel {
  bool enabled = false;
  double Cd_body = 0.0;
  double area = 0.0;  ///< m^2
  double rho = 1.225;
};

struct NetWrench {
  Vec3 force_world = Vec3::Zero();
  Vec3 moment_body = Vec3::Zero();
};

NetWrench net_wrench(const RigidBodyState& s, const Vec3& rotor_force_body,
                     const Vec3& rotor_moment_body, const MassProperties& mp,
                     const DragModel& drag, double g = kDefaultGravity);

/// Semi-implicit Euler:
///   v' = v + F/m dt,  p' = p + v' dt,
///   w' = w + J^-1 (M - w x Jw) dt,  q' = q * exp(w' dt / 2).
RigidBodyState step(const RigidBodyState& s, const Vec3& force_world, const Vec3& moment_body,
                    const MassProperties& mp, double dt);

/// Ground clamp: a body below z = 0 that is still descending is put at rest
/// on the ground (z = 0, v = 0, w = 0). Returns true when the clamp fired.
bool apply_ground_clamp(RigidBodyState& s);

}  // namespace swarmsim
