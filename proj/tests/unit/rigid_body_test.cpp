#include "swarmsim/rigid_body.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "swarmsim/error.hpp"

using namespace swarmsim;

namespace {

MassProperties quad_mass() { return MassProperties(1.5, Vec3(0.029, 0.029, 0.055).asDiagonal()); }

}  // namespace

TEST(MassProperties, RejectsBadInertia) {
  const auto expect_singular = [](double mass, const Mat3& j) {
    try {
      MassProperties mp(mass, j);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::SingularInertia);
    }
  };
  expect_singular(1.0, Vec3(1.0, 1.0, 0.0).asDiagonal());
  expect_singular(1.0, Vec3(1.0, -1.0, 1.0).asDiagonal());
  Mat3 asym = Mat3::Identity();
  asym(0, 1) = 0.5;
  expect_singular(1.0, asym);
  EXPECT_THROW(MassProperties(0.0, Mat3::Identity()), Error);
}

TEST(RigidBody, FreeFallMatchesDiscreteClosedForm) {
  const MassProperties mp = quad_mass();
  const double g = 9.81, dt = 0.001;
  RigidBodyState s;
  s.p = Vec3(0.0, 0.0, 100.0);
  const Vec3 gravity_force(0.0, 0.0, -mp.mass() * g);
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    s = step(s, gravity_force, Vec3::Zero(), mp, dt);
  }
  // Semi-implicit Euler: v_k = -g dt k, so z_N - z_0 = -g dt^2 N (N + 1) / 2.
  const double expected = -g * dt * dt * n * (n + 1) / 2.0;
  EXPECT_NEAR(expected, -4.909905, 1e-12);
  EXPECT_NEAR((s.p.z() - 100.0) / expected, 1.0, 1e-12);
  EXPECT_EQ(s.p.x(), 0.0);
  EXPECT_EQ(s.p.y(), 0.0);
}

TEST(RigidBody, SymmetricSpinIsPreservedExactly) {
  const MassProperties mp = quad_mass();
  RigidBodyState s;
  s.omega = Vec3(0.0, 0.0, 3.7);
  for (int k = 0; k < 10000; ++k) {
    s = step(s, Vec3::Zero(), Vec3::Zero(), mp, 0.001);
  }
  EXPECT_EQ(s.omega, Vec3(0.0, 0.0, 3.7));
  // Spin about a transverse principal axis of the symmetric body as well.
  s = RigidBodyState{};
  s.omega = Vec3(1.2, 0.0, 0.0);
  for (int k = 0; k < 10000; ++k) {
    s = step(s, Vec3::Zero(), Vec3::Zero(), mp, 0.001);
  }
  EXPECT_EQ(s.omega, Vec3(1.2, 0.0, 0.0));
}

TEST(RigidBody, TorqueFreeAngularMomentumMagnitude) {
  const MassProperties mp(1.0, Vec3(0.02, 0.03, 0.05).asDiagonal());
  RigidBodyState s;
  s.omega = Vec3(0.5, 0.3, 1.0);
  const double l0 = (mp.inertia() * s.omega).norm();
  const Vec3 l0_world = rotate(s.q, mp.inertia() * s.omega);
  for (int k = 0; k < 10000; ++k) {
    s = step(s, Vec3::Zero(), Vec3::Zero(), mp, 0.001);
  }
  const double l1 = (mp.inertia() * s.omega).norm();
  EXPECT_NEAR(l1 / l0, 1.0, 1e-3);
  const Vec3 l1_world = rotate(s.q, mp.inertia() * s.omega);
  EXPECT_LT((l1_world - l0_world).norm() / l0, 1e-2);
}

TEST(RigidBody, QuaternionStaysUnit) {
  const MassProperties mp = quad_mass();
  RigidBodyState s;
  s.omega = Vec3(2.0, -1.0, 0.5);
  for (int k = 0; k < 20000; ++k) {
    s = step(s, Vec3::Zero(), Vec3(0.01, 0.0, -0.02), mp, 0.001);
    const UnitQuat& q = s.q;
    ASSERT_NEAR(q.w() * q.w() + q.x() * q.x() + q.y() * q.y() + q.z() * q.z(), 1.0, 1e-9);
  }
}

TEST(NetWrench, GravityAndRotatedThrust) {
  const MassProperties mp = quad_mass();
  RigidBodyState s;
  s.q = UnitQuat::from_axis_angle(Vec3::UnitX(), 0.2);
  const NetWrench w = net_wrench(s, Vec3(0, 0, 20.0), Vec3(0.1, 0.2, 0.3), mp, DragModel{}, 9.81);
  const Vec3 expected = rotate(s.q, Vec3(0, 0, 20.0)) + Vec3(0, 0, -1.5 * 9.81);
  EXPECT_LT((w.force_world - expected).norm(), 1e-12);
  EXPECT_EQ(w.moment_body, Vec3(0.1, 0.2, 0.3));
}

TEST(NetWrench, QuadraticDragOpposesVelocity) {
  const MassProperties mp = quad_mass();
  DragModel drag{true, 1.0, 0.1, 1.2};
  RigidBodyState s;
  s.v = Vec3(3.0, 0.0, -4.0);
  const NetWrench w = net_wrench(s, Vec3::Zero(), Vec3::Zero(), mp, drag, 9.81);
  const Vec3 d = w.force_world - Vec3(0, 0, -1.5 * 9.81);
  // 0.5 rho Cd A |v| v with |v| = 5.
  EXPECT_LT((d + 0.5 * 1.2 * 1.0 * 0.1 * 5.0 * s.v).norm(), 1e-12);
}

TEST(GroundClamp, StopsDescendingBodyAtZero) {
  RigidBodyState s;
  s.p = Vec3(1.0, 2.0, -0.01);
  s.v = Vec3(0.5, 0.0, -1.0);
  s.omega = Vec3(0.1, 0.2, 0.3);
  EXPECT_TRUE(apply_ground_clamp(s));
  EXPECT_EQ(s.p, Vec3(1.0, 2.0, 0.0));
  EXPECT_EQ(s.v, Vec3::Zero());
  EXPECT_EQ(s.omega, Vec3::Zero());

  RigidBodyState up;
  up.p = Vec3(0.0, 0.0, 0.5);
  up.v = Vec3(0.0, 0.0, -1.0);
  EXPECT_FALSE(apply_ground_clamp(up));
}
