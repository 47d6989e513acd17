#include "swarmsim/rigid_body.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "swarmsim/error.hpp"

namespace swarmsim {

MassProperties::MassProperties(double mass, const Mat3& inertia)
    : mass_(mass), inertia_(inertia) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  }
  if (!inertia.allFinite() || !inertia.isApprox(inertia.transpose(), 1e-12)) {
    throw Error(ErrorKind::SingularInertia, "inertia must be symmetric");
  }
  const Eigen::LLT<Mat3> llt(inertia);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularInertia, "inertia must be positive-definite");
  }
  inertia_inv_ = llt.solve(Mat3::Identity());
}

NetWrench net_wrench(const RigidBodyState& s, const Vec3& rotor_force_body,
                     const Vec3& rotor_moment_body, const MassProperties& mp,
                     const DragModel& drag, double g) {
  NetWrench out;
  out.force_world = rotate(s.q, rotor_force_body) + Vec3(0.0, 0.0, -mp.mass() * g);
  if (drag.enabled) {
    out.force_world += -0.5 * drag.rho * drag.Cd_body * drag.area * s.v.norm() * s.v;
  }
  out.moment_body = rotor_moment_body;
  return out;
}

RigidBodyState step(const RigidBodyState& s, const Vec3& force_world, const Vec3& moment_body,
                    const MassProperties& mp, double dt) {
  RigidBodyState n;
  const Vec3 a = force_world / mp.mass();
  n.v = s.v + a * dt;
  n.p = s.p + n.v * dt;
  const Mat3& J = mp.inertia();
  const Vec3 omega_dot = mp.inertia_inv() * (moment_body - s.omega.cross(J * s.omega));
  n.omega = s.omega + omega_dot * dt;
  n.q = quat_integrate(s.q, n.omega, dt);
  return n;
}

bool apply_ground_clamp(RigidBodyState& s) {
  if (s.p.z() < 0.0 && s.v.z() < 0.0) {
    s.p.z() = 0.0;
    s.v.setZero();
    s.omega.setZero();
    return true;
  }
  return false;
}

}  // namespace swarmsim
