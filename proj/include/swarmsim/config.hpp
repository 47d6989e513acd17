#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swarmsim/camera.hpp"
#include "swarmsim/clock.hpp"
#include "swarmsim/flight_ctrl.hpp"
#include "swarmsim/formation.hpp"
#include "swarmsim/rotor_aero.hpp"
#include "swarmsim/sensors.hpp"
#include "swarmsim/vehicle.hpp"

namespace swarmsim {

struct Rates {
  double control = 250.0;
  double telemetry = 30.0;
  double log = 50.0;        ///< ground truth and velocity tracking
  double formation = 50.0;  ///< leader broadcast / follower update
};

enum class Role { Solo, Leader, Follower };

std::string to_string(Role role);

struct CameraConfig {
  bool enabled = false;
  CameraIntrinsics intrinsics;
  UnitQuat mount = forward_camera_mount();  ///< optical frame -> body
  Vec3 offset = Vec3::Zero();               ///< left eye position in body frame
};

struct VehicleConfig {
  int id = 0;
  Role role = Role::Solo;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  bool airborne = true;  ///< start with rotors at hover speed
  bool position_given = false;

  BladeGeometry blade;
  double arm = 0.25;
  double omega_max = 1000.0;
  double mass = 1.5;
  Mat3 inertia = Mat3(Eigen::Vector3d(0.029, 0.029, 0.055).asDiagonal());
  DragModel drag;
  double motor_tau = 0.02;
  ControllerGains gains = ControllerGains::defaults();

  bool sensors_enabled = true;
  SensorRig sensors;
  CameraConfig camera;
};

/// Builds the airframe description (derives rotor coefficients).
VehicleParams make_vehicle_params(const VehicleConfig& vc, double gravity);

struct LandmarkGenerator {
  std::size_t n = 0;
  Vec3 lo = Vec3(-20.0, -20.0, 0.0);
  Vec3 hi = Vec3(20.0, 20.0, 10.0);
  std::uint64_t seed = 1;
};

struct WorldConfig {
  std::optional<std::filesystem::path> landmark_file;
  std::optional<LandmarkGenerator> generator;
  double mag_declination = 0.0;
  double mag_inclination = 0.0;
  Vec3 origin = Vec3::Zero();
};

struct FormationConfig {
  bool enabled = false;
  std::vector<std::string> shapes{"cube"};
  double phase_duration = 0.0;  ///< 0: stay in the first shape until commanded
  FollowerLaw law;
  AssignmentPolicy assignment = AssignmentPolicy::Identity;
  std::size_t link_delay_ticks = 0;
  double d_safe = kDefaultSafeDistance;
  std::map<std::string, std::filesystem::path> shape_files;
};

struct LogConfig {
  std::optional<std::filesystem::path> dir;
  bool sensors = true;
  bool camera = true;
  bool velocity = true;
};

struct SimConfig {
  Rational dt{1, 1000};
  double duration = 10.0;  ///< default run length (s)
  std::uint64_t seed = 1;
  std::optional<double> realtime_factor;  ///< nullopt: unbounded
  Rates rates;
  double gravity = kDefaultGravity;
  std::vector<VehicleConfig> vehicles;
  WorldConfig world;
  FormationConfig formation;
  LogConfig log;
  std::optional<int> serve_port;
};

/// Parses and validates. Relative paths resolve against `base_dir`.
/// Throws ConfigError with a JSON-pointer-ish location on bad input.
SimConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
SimConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const SimConfig& cfg);

/// Checks rates divide the physics rate, unique ids, roles, shapes.
void validate(const SimConfig& cfg);

/// Shapes named in the formation block, resolved from files or built-ins.
std::map<std::string, FormationShape> resolve_shapes(const FormationConfig& fc);

/// Artifact-chosen noise figures for a small MEMS IMU, magnetometer,
/// barometer and GPS receiver.
SensorRig default_sensor_rig();

/// One solo quad hovering at (0, 0, altitude).
SimConfig make_hover_config(double altitude = 2.0);

/// One leader plus `followers` followers at leader + first-shape offsets.
SimConfig make_formation_config(const std::vector<std::string>& shapes, double phase_duration,
                                std::size_t followers = 8);

}  // namespace swarmsim
