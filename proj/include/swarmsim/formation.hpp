#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include "swarmsim/geometry.hpp"
#include "swarmsim/rigid_body.hpp"

namespace swarmsim {

/// Follower offsets relative to the leader, world-aligned.
struct FormationShape {
  std::string name;
  std::vector<Vec3> offsets;
};

inline constexpr double kDefaultSafeDistance = 0.8;

/// 8 vertices of a 2 m cube centred on the leader.
FormationShape cube_shape();
/// Leader at the apex; 2 m square base at z = -1 and the four base-edge
/// midpoints lifted to the leader's altitude.
FormationShape pyramid_shape();
/// 8 points evenly spaced along a horizontal equilateral triangle outline
/// (side 4.8 m) whose centroid is the leader.
FormationShape triangle_shape();
/// Built-in shape by name; throws InvalidArgument for unknown names.
FormationShape builtin_shape(const std::string& name);

/// Smallest pairwise distance between follower targets (inf for < 2).
double min_separation(const FormationShape& shape);

/// Throws InvalidArgument for duplicate offsets or separation < d_safe.
void validate(const FormationShape& shape, double d_safe = kDefaultSafeDistance);

/// CSV "follower_index,dx,dy,dz" with a header row.
FormationShape read_shape(const std::filesystem::path& path, const std::string& name);
void write_shape(const std::filesystem::path& path, const FormationShape& shape);

struct PointMassState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

struct FollowerLaw {
  double kp = 2.0;
  double kd = 3.0;
  double a_max = 4.0;  ///< m/s^2
  double v_max = 3.0;  ///< m/s
};

void validate(const FollowerLaw& law);

/// Leader kinematics broadcast once per control tick.
struct LeaderMsg {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();

  bool operator==(const LeaderMsg& o) const {
    return t == o.t && p == o.p && v == o.v && a == o.a;
  }
};

LeaderMsg leader_broadcast(double t, const PointMassState& leader, const Vec3& a_leader);
LeaderMsg leader_broadcast(double t, const RigidBodyState& leader, const Vec3& a_leader);

/// u = a_L + kp ((p_L + offset) - p) + kd (v_L - v), with ||u|| <= a_max.
Vec3 follower_accel(const PointMassState& self, const LeaderMsg& msg, const Vec3& offset,
                    const FollowerLaw& law);

/// Velocity reference for a vehicle behind a velocity controller:
/// v + follower_accel(...) / kd, norm-limited to v_max.
Vec3 follower_velocity_ref(const PointMassState& self, const LeaderMsg& msg, const Vec3& offset,
                           const FollowerLaw& law);

/// Semi-implicit Euler on the double integrator with ||v|| <= v_max.
PointMassState point_mass_step(const PointMassState& s, const Vec3& u, const FollowerLaw& law,
                               double dt);

enum class AssignmentPolicy { Identity, MinTotalDistance };

struct SlotAssignment {
  std::size_t follower_id = 0;
  Vec3 new_offset = Vec3::Zero();
};

/// Maps followers (currently at current.offsets[i]) onto target slots.
/// MinTotalDistance minimizes the summed Euclidean travel exactly.
/// Throws ShapeMismatch when follower counts differ.
std::vector<SlotAssignment> reconfigure(const FormationShape& current,
                                        const FormationShape& target, AssignmentPolicy policy);

/// Exact minimum-cost perfect matching on a square cost matrix
/// (row i -> column result[i]).
std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost);

/// Fixed integer-tick delay on the leader link. Delay 0 passes through.
class LeaderLink {
 public:
  explicit LeaderLink(std::size_t delay_ticks = 0) : delay_(delay_ticks) {}

  /// Pushes this tick's message and returns the one visible to followers,
  /// i.e. the message from `delay` ticks ago (the oldest available while
  /// the line fills).
  LeaderMsg transmit(const LeaderMsg& msg);

 private:
  std::size_t delay_;
  std::deque<LeaderMsg> line_;
};

/// Piecewise-linear leader playback through timed waypoints; holds the last
/// waypoint afterwards. A single waypoint means a static leader.
class LeaderScript {
 public:
  struct Waypoint {
    double t = 0.0;
    Vec3 p = Vec3::Zero();
  };

  explicit LeaderScript(std::vector<Waypoint> waypoints);

  PointMassState sample(double t) const;

 private:
  std::vector<Waypoint> waypoints_;
};

struct FastSimConfig {
  double dt = 0.01;
  FollowerLaw law;
  std::vector<FormationShape> shape_sequence;
  double phase_duration = 15.0;  ///< sim seconds spent in each shape
  double error_tolerance = 0.1;  ///< m, used for settle-time reporting
  AssignmentPolicy policy = AssignmentPolicy::Identity;
  std::size_t link_delay_ticks = 0;
  std::vector<LeaderScript::Waypoint> leader_waypoints{{0.0, Vec3(0.0, 0.0, 5.0)}};
};

struct PhaseReport {
  std::string shape;
  double start_time = 0.0;
  double settle_time = -1.0;  ///< s after switch until error stays < tolerance, -1 if never
  double error_at_10s = 0.0;  ///< max follower error 10 s after the switch
  double final_error = 0.0;   ///< max follower error at phase end
};

struct FastSimReport {
  std::vector<PhaseReport> phases;
  std::size_t steps = 0;
  std::vector<PointMassState> final_followers;
};

/// Point-mass formation simulator: leader playback plus one follower per
/// offset, switching shapes every phase_duration seconds.
class FastFormationSim {
 public:
  explicit FastFormationSim(FastSimConfig cfg);

  FastSimReport run();

  /// Maximum distance of any follower from its current target.
  double max_error(const LeaderMsg& msg) const;

 private:
  FastSimConfig cfg_;
  LeaderScript leader_;
  std::vector<PointMassState> followers_;
  std::vector<Vec3> slots_;
};

}  // namespace swarmsim
