#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "swarmsim/clock.hpp"
#include "swarmsim/error.hpp"
#include "swarmsim/geometry.hpp"

using namespace swarmsim;

namespace {

UnitQuat random_quat(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  return UnitQuat(n(gen), n(gen), n(gen), n(gen));
}

Vec3 random_vec(std::mt19937_64& gen, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(gen), u(gen), u(gen)};
}

Eigen::Quaterniond to_eigen(const UnitQuat& q) { return {q.w(), q.x(), q.y(), q.z()}; }

double norm(const UnitQuat& q) {
  return std::sqrt(q.w() * q.w() + q.x() * q.x() + q.y() * q.y() + q.z() * q.z());
}

}  // namespace

TEST(UnitQuat, ConstructorNormalizes) {
  const UnitQuat q(2.0, 0.0, 0.0, 0.0);
  EXPECT_EQ(q, UnitQuat::identity());
  const UnitQuat z(0.0, 0.0, 0.0, 0.0);
  EXPECT_EQ(z, UnitQuat::identity());
}

TEST(UnitQuat, RotateMatchesEigen) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 500; ++i) {
    const UnitQuat q = random_quat(gen);
    const Vec3 v = random_vec(gen, 10.0);
    const Vec3 expected = to_eigen(q) * v;
    EXPECT_LT((rotate(q, v) - expected).norm(), 1e-12);
    EXPECT_LT((rotate_inverse(q, rotate(q, v)) - v).norm(), 1e-12);
    EXPECT_LT((q.to_matrix() - to_eigen(q).toRotationMatrix()).norm(), 1e-12);
  }
}

TEST(UnitQuat, RotatePreservesNorm) {
  std::mt19937_64 gen(2);
  for (int i = 0; i < 500; ++i) {
    const UnitQuat q = random_quat(gen);
    const Vec3 v = random_vec(gen, 100.0);
    EXPECT_NEAR(rotate(q, v).norm(), v.norm(), 1e-12 * (1.0 + v.norm()));
  }
}

TEST(UnitQuat, ProductComposesRotations) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 200; ++i) {
    const UnitQuat a = random_quat(gen);
    const UnitQuat b = random_quat(gen);
    const Vec3 v = random_vec(gen);
    EXPECT_LT((rotate(a * b, v) - rotate(a, rotate(b, v))).norm(), 1e-12);
    EXPECT_NEAR(norm(a * b), 1.0, 1e-12);
  }
}

TEST(UnitQuat, FromMatrixRoundTrip) {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 500; ++i) {
    const UnitQuat q = random_quat(gen);
    const UnitQuat back = UnitQuat::from_matrix(q.to_matrix());
    // q and -q are the same rotation.
    EXPECT_NEAR(rotation_angle(q.conjugate() * back), 0.0, 1e-7);
  }
  // Half-turns exercise every branch of the conversion.
  for (const Vec3& axis : std::vector<Vec3>{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(),
                                           Vec3(1, 1, 0).normalized()}) {
    const UnitQuat q = UnitQuat::from_axis_angle(axis, std::numbers::pi);
    const UnitQuat back = UnitQuat::from_matrix(q.to_matrix());
    EXPECT_NEAR(rotation_angle(q.conjugate() * back), 0.0, 1e-7);
  }
}

TEST(UnitQuat, YawRoundTrip) {
  for (double yaw : {-3.0, -1.0, 0.0, 0.5, 2.5}) {
    EXPECT_NEAR(UnitQuat::from_yaw(yaw).yaw(), yaw, 1e-12);
  }
}

TEST(QuatIntegrate, MatchesAxisAngleForConstantRate) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 200; ++i) {
    const UnitQuat q = random_quat(gen);
    const Vec3 w = random_vec(gen, 5.0);
    const double dt = 0.01;
    const UnitQuat next = quat_integrate(q, w, dt);
    const Eigen::Quaterniond expected =
        to_eigen(q) * Eigen::Quaterniond(Eigen::AngleAxisd(w.norm() * dt, w.normalized()));
    const UnitQuat e(expected.w(), expected.x(), expected.y(), expected.z());
    EXPECT_NEAR(rotation_angle(next.conjugate() * e), 0.0, 1e-7);
  }
}

TEST(QuatIntegrate, NormStaysUnitOverLongRuns) {
  UnitQuat q;
  const Vec3 w(0.3, -1.7, 2.2);
  for (int i = 0; i < 100000; ++i) {
    q = quat_integrate(q, w, 0.001);
  }
  EXPECT_NEAR(norm(q), 1.0, 1e-9);
}

TEST(QuatIntegrate, ZeroRateIsIdentity) {
  const UnitQuat q = UnitQuat::from_axis_angle(Vec3::UnitX(), 0.3);
  EXPECT_EQ(quat_integrate(q, Vec3::Zero(), 0.01), q);
}

TEST(RotationAngle, KnownAngles) {
  EXPECT_NEAR(rotation_angle(UnitQuat::from_axis_angle(Vec3::UnitZ(), 0.25)), 0.25, 1e-12);
  EXPECT_NEAR(rotation_angle(UnitQuat::from_axis_angle(Vec3::UnitY(), std::numbers::pi)),
              std::numbers::pi, 1e-12);
  // Angle is sign-invariant in q.
  const UnitQuat q = UnitQuat::from_axis_angle(Vec3::UnitX(), 2.0);
  EXPECT_NEAR(rotation_angle(UnitQuat(-q.w(), -q.x(), -q.y(), -q.z())), 2.0, 1e-12);
}

TEST(Pose, ComposeInverseIsIdentity) {
  std::mt19937_64 gen(6);
  for (int i = 0; i < 100; ++i) {
    const Pose a{0.0, random_vec(gen, 5.0), random_quat(gen)};
    const Pose e = compose(a, inverse(a));
    EXPECT_LT(e.p.norm(), 1e-12);
    EXPECT_NEAR(rotation_angle(e.q), 0.0, 1e-7);
  }
}

TEST(Rational, RecoversDecimalSteps) {
  EXPECT_EQ(Rational::from_seconds(0.001), (Rational{1, 1000}));
  EXPECT_EQ(Rational::from_seconds(0.004), (Rational{1, 250}));
  EXPECT_EQ(Rational::from_seconds(0.0025), (Rational{1, 400}));
  EXPECT_EQ(Rational::from_seconds(0.5), (Rational{1, 2}));
  EXPECT_THROW(Rational::from_seconds(0.0), Error);
  EXPECT_THROW(Rational::from_seconds(-1.0), Error);
}

TEST(StepsPerPeriod, DivisibleAndNot) {
  const Rational dt{1, 1000};
  EXPECT_EQ(steps_per_period(dt, 250.0), 4);
  EXPECT_EQ(steps_per_period(dt, 1000.0), 1);
  EXPECT_EQ(steps_per_period(dt, 10.0), 100);
  EXPECT_FALSE(steps_per_period(dt, 30.0));
  EXPECT_FALSE(steps_per_period(dt, 2000.0));
  EXPECT_FALSE(steps_per_period(dt, 12.5));
}

TEST(SimClock, TimeIsStepTimesDtExactly) {
  SimClock clock(Rational{1, 1000});
  double accumulated = 0.0;
  bool drifted = false;
  for (std::uint64_t k = 1; k <= 100000; ++k) {
    clock.advance();
    accumulated += 0.001;
    ASSERT_EQ(clock.step_index(), k);
    // The exact product k/1000 correctly rounded.
    ASSERT_EQ(clock.t(), static_cast<double>(k) / 1000.0);
    drifted = drifted || accumulated != clock.t();
  }
  EXPECT_TRUE(drifted);  // repeated addition would not have matched
  EXPECT_EQ(clock.t(), 100.0);
}

TEST(SimClock, AdvisoryDelay) {
  SimClock unbounded(Rational{1, 1000});
  EXPECT_EQ(unbounded.advance(), 0.0);
  SimClock paced(Rational{1, 1000}, 2.0);
  EXPECT_DOUBLE_EQ(paced.advance(), 0.0005);
  paced.set_realtime_factor(std::nullopt);
  EXPECT_EQ(paced.advised_delay(), 0.0);
}
