#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "swarmsim/camera.hpp"
#include "swarmsim/clock.hpp"
#include "swarmsim/config.hpp"
#include "swarmsim/flight_ctrl.hpp"
#include "swarmsim/formation.hpp"
#include "swarmsim/rng.hpp"
#include "swarmsim/sensors.hpp"

namespace swarmsim {

class LogBundle;

enum class VelocityFrame { World, Body };

struct VelocitySetpointCmd {
  int id = 0;
  Vec3 v = Vec3::Zero();
  double yaw_rate = 0.0;
  VelocityFrame frame = VelocityFrame::World;  ///< Body: x forward, y left, yaw-only rotation
};
struct SetShapeCmd {
  std::string name;
};
struct PauseCmd {};
struct ResumeCmd {};
struct StepCmd {
  std::int64_t n = 1;
};
struct SetRtfCmd {
  std::optional<double> factor;  ///< nullopt: unbounded
};
struct TakeOffCmd {
  int id = 0;
  double altitude = 2.0;
};
struct LandCmd {
  int id = 0;
};

using CommandPayload = std::variant<VelocitySetpointCmd, SetShapeCmd, PauseCmd, ResumeCmd,
                                    StepCmd, SetRtfCmd, TakeOffCmd, LandCmd>;

struct Command {
  std::uint64_t issued_at = 0;  ///< receipt order index
  CommandPayload payload;
};

/// True for commands that change the simulated world (as opposed to
/// pause/step/pacing, which only affect when ticks happen).
bool affects_world(const CommandPayload& payload);

struct UavSnapshot {
  int id = 0;
  Role role = Role::Solo;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  UnitQuat q;
};

/// Immutable copy of the world handed to the network layer.
struct StateSnapshot {
  double t = 0.0;
  std::uint64_t step = 0;
  bool paused = false;
  std::optional<std::string> shape;
  std::vector<UavSnapshot> uavs;
};

/// One simulated vehicle: airframe, controller, motors, sensors.
struct VehicleRuntime {
  VehicleConfig cfg;
  VehicleParams params;
  Mixer mixer;
  RigidBodyState state;
  std::vector<double> omega;
  ControllerState ctrl;
  Setpoint setpoint;
  SensorRig rig;
  std::array<std::unique_ptr<RngStream>, 7> rng;
  bool on_ground = false;
};

/// The lockstep world. Single-threaded; every call is deterministic given
/// the configuration and the sequence of apply()/step() calls.
class Simulator {
 public:
  /// `log` may be null. Throws ConfigError for invalid configurations.
  explicit Simulator(SimConfig cfg, LogBundle* log = nullptr);
  ~Simulator();

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Applies a world command at the current tick boundary. Throws
  /// InvalidArgument for unknown vehicle ids or shapes. Pause, Resume,
  /// Step and SetRtf are runner concerns and are ignored here.
  void apply(const CommandPayload& payload);

  /// Advances one physics tick.
  void step();
  void run(std::uint64_t n);

  std::uint64_t step_index() const { return clock_.step_index(); }
  double t() const { return clock_.t(); }
  const SimClock& clock() const { return clock_; }
  SimClock& clock() { return clock_; }
  const SimConfig& config() const { return cfg_; }

  StateSnapshot snapshot() const;
  const std::vector<VehicleRuntime>& vehicles() const { return vehicles_; }
  const VehicleRuntime& vehicle(int id) const;

  std::optional<std::string> current_shape() const;
  /// Distance of follower `k` (formation order) from its slot, w.r.t. the
  /// true leader position.
  double formation_error() const;
  const std::vector<std::string>& shape_names() const { return shape_names_; }

  const std::vector<Landmark>& landmarks() const { return landmarks_; }

 private:
  VehicleRuntime& find(int id);
  void switch_shape(const std::string& name);
  void formation_update();
  void step_vehicle(VehicleRuntime& v);

  SimConfig cfg_;
  LogBundle* log_;
  SimClock clock_;
  std::vector<VehicleRuntime> vehicles_;
  std::vector<Landmark> landmarks_;
  Vec3 mag_field_ = Vec3::UnitY();

  std::int64_t ctrl_period_ = 1;
  std::int64_t log_period_ = 1;
  std::int64_t formation_period_ = 1;
  std::int64_t imu_period_ = 1, mag_period_ = 1, baro_period_ = 1, gps_period_ = 1,
               camera_period_ = 1;

  // Formation state.
  std::map<std::string, FormationShape> shapes_;
  std::vector<std::string> shape_names_;
  std::optional<std::size_t> leader_index_;
  std::vector<std::size_t> follower_index_;
  std::vector<Vec3> slots_;
  std::string shape_;
  std::size_t auto_phase_ = 0;
  std::int64_t phase_ticks_ = 0;
  LeaderLink link_;
  Vec3 leader_accel_ = Vec3::Zero();
};

/// Runs a formation configuration for phase_duration x shapes seconds and
/// reports per-phase convergence of the worst follower error, sampled at
/// the formation rate.
std::vector<PhaseReport> run_formation_scenario(const SimConfig& cfg, double tolerance,
                                                LogBundle* log = nullptr);

}  // namespace swarmsim
