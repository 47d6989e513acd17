#include "swarmsim/formation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>

#include "swarmsim/error.hpp"

using namespace swarmsim;

namespace {

double brute_force_cost(const std::vector<std::vector<double>>& cost) {
  std::vector<std::size_t> perm(cost.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += cost[i][perm[i]];
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(Shapes, BuiltinsHaveEightSeparatedSlots) {
  for (const std::string name : {"cube", "pyramid", "triangle"}) {
    const FormationShape s = builtin_shape(name);
    EXPECT_EQ(s.name, name);
    EXPECT_EQ(s.offsets.size(), 8u);
    EXPECT_GE(min_separation(s), kDefaultSafeDistance) << name;
    EXPECT_NO_THROW(validate(s));
    for (const Vec3& o : s.offsets) {
      EXPECT_GE(o.norm(), kDefaultSafeDistance) << name;
    }
  }
  EXPECT_THROW(builtin_shape("dodecahedron"), Error);
}

TEST(Shapes, CubeVerticesAreCornersOfTwoMetreCube) {
  for (const Vec3& o : cube_shape().offsets) {
    EXPECT_EQ(o.cwiseAbs(), Vec3::Ones());
  }
}

TEST(Shapes, TriangleOutlineAroundLeader) {
  // Equilateral triangle, side 4.8, centroid at the origin, apex on +y.
  // A point is on the outline iff its largest projection onto the outward
  // edge normals equals the inradius.
  const double side = 4.8;
  const double inradius = side / (2.0 * std::sqrt(3.0));
  std::vector<Vec3> normals;
  for (int i = 0; i < 3; ++i) {
    const double ang = -M_PI / 2.0 + i * 2.0 * M_PI / 3.0;
    normals.emplace_back(std::cos(ang), std::sin(ang), 0.0);
  }
  const FormationShape s = triangle_shape();
  for (const Vec3& o : s.offsets) {
    EXPECT_EQ(o.z(), 0.0);
    double support = -std::numeric_limits<double>::infinity();
    for (const Vec3& n : normals) support = std::max(support, n.dot(o));
    EXPECT_NEAR(support, inradius, 1e-12);
  }
  EXPECT_NEAR(s.offsets[0].y(), side / std::sqrt(3.0), 1e-12);
}

TEST(Shapes, ValidateRejectsCollisions) {
  FormationShape s{"tight", {Vec3(1, 0, 0), Vec3(1.5, 0, 0)}};
  EXPECT_THROW(validate(s), Error);
  s.offsets[1] = Vec3(1, 0, 0);
  EXPECT_THROW(validate(s, 0.0), Error);
  EXPECT_NO_THROW(validate(FormationShape{"ok", {Vec3(1, 0, 0), Vec3(2, 0, 0)}}));
}

TEST(Shapes, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "swarmsim_shape_test.csv";
  write_shape(path, pyramid_shape());
  const FormationShape back = read_shape(path, "pyramid");
  EXPECT_EQ(back.offsets, pyramid_shape().offsets);
  std::filesystem::remove(path);
}

TEST(FollowerLaw, ErrorDecaysAsCriticalDoubleIntegrator) {
  // kp = 2, kd = 3: e'' + 3e' + 2e = 0, e(0) = 1, e'(0) = 0.
  FollowerLaw law;
  const double dt = 1e-4;
  const LeaderMsg leader{0.0, Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  PointMassState s;
  s.p = Vec3(1.0, 0.0, 0.0);
  for (int k = 1; k <= 50000; ++k) {
    s = point_mass_step(s, follower_accel(s, leader, Vec3::Zero(), law), law, dt);
    if (k % 5000 == 0) {
      const double t = k * dt;
      EXPECT_NEAR(s.p.x(), 2.0 * std::exp(-t) - std::exp(-2.0 * t), 1e-3) << t;
    }
  }
}

TEST(FollowerLaw, AccelerationAndSpeedLimits) {
  FollowerLaw law;
  const LeaderMsg leader{0.0, Vec3(100, 0, 0), Vec3::Zero(), Vec3::Zero()};
  PointMassState s;
  const Vec3 u = follower_accel(s, leader, Vec3::Zero(), law);
  EXPECT_NEAR(u.norm(), law.a_max, 1e-12);
  for (int k = 0; k < 1000; ++k) {
    s = point_mass_step(s, follower_accel(s, leader, Vec3::Zero(), law), law, 0.01);
    EXPECT_LE(s.v.norm(), law.v_max + 1e-12);
  }
  EXPECT_LE(follower_velocity_ref(s, leader, Vec3::Zero(), law).norm(), law.v_max + 1e-12);
  law.kd = 0.0;
  EXPECT_THROW(validate(law), Error);
}

TEST(FollowerLaw, LeaderAccelerationFeedsForward) {
  FollowerLaw law;
  const LeaderMsg leader{0.0, Vec3(0, 0, 5), Vec3(1, 0, 0), Vec3(0.5, 0, 0)};
  PointMassState s;
  s.p = Vec3(1, 0, 5);
  s.v = Vec3(1, 0, 0);
  EXPECT_EQ(follower_accel(s, leader, Vec3(1, 0, 0), law), Vec3(0.5, 0, 0));
}

TEST(Assignment, HungarianMatchesBruteForce) {
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 8;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost)
      for (double& c : row) c = u(gen);
    const auto a = solve_assignment(cost);
    ASSERT_EQ(a.size(), n);
    std::vector<std::size_t> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(sorted[i], i);
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost[i][a[i]];
    EXPECT_NEAR(c, brute_force_cost(cost), 1e-9);
  }
}

TEST(Assignment, ReconfigurePolicies) {
  const FormationShape cube = cube_shape(), pyr = pyramid_shape();
  const auto id = reconfigure(cube, pyr, AssignmentPolicy::Identity);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(id[i].follower_id, i);
    EXPECT_EQ(id[i].new_offset, pyr.offsets[i]);
  }
  const auto best = reconfigure(cube, pyr, AssignmentPolicy::MinTotalDistance);
  double travel_id = 0.0, travel_best = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    travel_id += (id[i].new_offset - cube.offsets[id[i].follower_id]).norm();
    travel_best += (best[i].new_offset - cube.offsets[best[i].follower_id]).norm();
  }
  EXPECT_LE(travel_best, travel_id + 1e-12);
  FormationShape short_shape = pyr;
  short_shape.offsets.pop_back();
  try {
    reconfigure(cube, short_shape, AssignmentPolicy::Identity);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(LeaderLink, DelaysByWholeTicks) {
  LeaderLink none(0);
  LeaderMsg m;
  m.t = 1.0;
  EXPECT_EQ(none.transmit(m), m);
  LeaderLink link(3);
  for (int k = 0; k < 10; ++k) {
    LeaderMsg in;
    in.t = k;
    const LeaderMsg out = link.transmit(in);
    EXPECT_EQ(out.t, std::max(0, k - 3));
  }
}

TEST(LeaderScript, InterpolatesAndHolds) {
  const LeaderScript s({{0.0, Vec3(0, 0, 5)}, {2.0, Vec3(2, 0, 5)}});
  EXPECT_EQ(s.sample(1.0).p, Vec3(1, 0, 5));
  EXPECT_EQ(s.sample(1.0).v, Vec3(1, 0, 0));
  EXPECT_EQ(s.sample(5.0).p, Vec3(2, 0, 5));
  EXPECT_EQ(s.sample(5.0).v, Vec3::Zero());
}

TEST(FastSim, ConvergesWithinTenSecondsPerPhase) {
  FastSimConfig cfg;
  cfg.shape_sequence = {cube_shape(), pyramid_shape(), triangle_shape()};
  cfg.phase_duration = 15.0;
  const FastSimReport r = FastFormationSim(cfg).run();
  ASSERT_EQ(r.phases.size(), 3u);
  for (const PhaseReport& p : r.phases) {
    EXPECT_LT(p.error_at_10s, 0.1) << p.shape;
    EXPECT_GE(p.settle_time, 0.0) << p.shape;
    EXPECT_LE(p.settle_time, 10.0) << p.shape;
  }
  EXPECT_EQ(r.steps, 4500u);
}

TEST(FastSim, MovingLeaderAndDelayStillConverge) {
  FastSimConfig cfg;
  cfg.shape_sequence = {cube_shape(), triangle_shape()};
  cfg.policy = AssignmentPolicy::MinTotalDistance;
  cfg.link_delay_ticks = 5;
  cfg.leader_waypoints = {{0.0, Vec3(0, 0, 5)}, {10.0, Vec3(5, 0, 5)}};
  const FastSimReport r = FastFormationSim(cfg).run();
  for (const PhaseReport& p : r.phases) {
    EXPECT_LT(p.final_error, 0.1) << p.shape;
  }
}

TEST(FastSim, DeterministicAcrossRuns) {
  FastSimConfig cfg;
  cfg.shape_sequence = {cube_shape(), pyramid_shape()};
  const FastSimReport a = FastFormationSim(cfg).run();
  const FastSimReport b = FastFormationSim(cfg).run();
  ASSERT_EQ(a.final_followers.size(), b.final_followers.size());
  for (std::size_t i = 0; i < a.final_followers.size(); ++i) {
    EXPECT_EQ(a.final_followers[i].p, b.final_followers[i].p);
  }
}
