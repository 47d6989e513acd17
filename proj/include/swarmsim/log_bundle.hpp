#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swarmsim/camera.hpp"
#include "swarmsim/config.hpp"
#include "swarmsim/rigid_body.hpp"
#include "swarmsim/sensors.hpp"

namespace swarmsim {

/// Files written for one run. Every file gets its header when the bundle is
/// opened, so a run of zero steps leaves headers-only CSVs and empty TUMs.
///
///   config.json                 fully resolved configuration
///   commands.json               command transcript (written by close())
///   formation.csv               t,shape,max_error        (formation runs)
///   uav<id>_groundtruth.tum     TUM poses at the log rate
///   uav<id>_velocity.csv        t,vx_ref,vy_ref,vz_ref,vx,vy,vz
///   uav<id>_accel.csv etc.      t,true_*,meas_*
///   uav<id>_camera.csv          t,landmark_id,uL,vL,uR,vR
class LogBundle {
 public:
  /// Creates `dir` if needed. Throws IoError when it cannot be written.
  LogBundle(std::filesystem::path dir, const SimConfig& cfg);
  ~LogBundle();

  LogBundle(const LogBundle&) = delete;
  LogBundle& operator=(const LogBundle&) = delete;

  void ground_truth(int id, double t, const RigidBodyState& s);
  void velocity(int id, double t, const Vec3& v_ref, const Vec3& v);
  void sensor(int id, SensorIndex which, double t, std::span<const double> truth,
              std::span<const double> measured);
  void camera(int id, double t, const std::vector<StereoObservation>& obs);
  void formation(double t, const std::string& shape, double max_error);
  void command(std::uint64_t tick, const nlohmann::json& cmd);

  /// Writes the transcript and flushes everything. Throws IoError if any
  /// write failed. Further calls are no-ops.
  void close(std::uint64_t final_tick);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct VehicleFiles {
    std::ofstream gt;
    std::ofstream velocity;
    std::map<SensorIndex, std::ofstream> sensors;
  };

  std::ofstream open(const std::string& name, const std::string& header);
  VehicleFiles& files(int id);
  static void write(std::ofstream& out, const std::string& line);

  std::filesystem::path dir_;
  std::uint64_t seed_;
  std::map<int, VehicleFiles> vehicles_;
  std::ofstream formation_;
  nlohmann::json commands_ = nlohmann::json::array();
  bool closed_ = false;
  std::string line_;
};

/// Name of the sensor CSV suffix ("accel", "gyro", ...).
std::string sensor_file_stem(SensorIndex which);

}  // namespace swarmsim
