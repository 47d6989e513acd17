#include "swarmsim/log_bundle.hpp"

#include <system_error>

#include "swarmsim/error.hpp"
#include "swarmsim/text_io.hpp"
#include "swarmsim/traj_eval.hpp"

namespace swarmsim {

std::string sensor_file_stem(SensorIndex which) {
  switch (which) {
    case SensorIndex::Accel: return "accel";
    case SensorIndex::Gyro: return "gyro";
    case SensorIndex::Mag: return "mag";
    case SensorIndex::Baro: return "baro";
    case SensorIndex::GpsPos: return "gps_pos";
    case SensorIndex::GpsVel: return "gps_vel";
    case SensorIndex::Camera: return "camera";
  }
  return "unknown";
}

namespace {

std::string sensor_header(SensorIndex which) {
  if (which == SensorIndex::Baro) {
    return "t,true_alt,meas_alt\n";
  }
  return "t,true_x,true_y,true_z,meas_x,meas_y,meas_z\n";
}

std::string uav_prefix(int id) { return "uav" + std::to_string(id) + "_"; }

}  // namespace

LogBundle::LogBundle(std::filesystem::path dir, const SimConfig& cfg)
    : dir_(std::move(dir)), seed_(cfg.seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorKind::IoError, "cannot create log dir " + dir_.string() + ": " + ec.message());
  }
  {
    std::ofstream cfg_out = open("config.json", "");
    write(cfg_out, config_to_json(cfg).dump(2) + "\n");
  }
  for (const VehicleConfig& v : cfg.vehicles) {
    VehicleFiles& f = vehicles_[v.id];
    const std::string prefix = uav_prefix(v.id);
    f.gt = open(prefix + "groundtruth.tum", "");
    if (cfg.log.velocity) {
      f.velocity = open(prefix + "velocity.csv", "t,vx_ref,vy_ref,vz_ref,vx,vy,vz\n");
    }
    if (cfg.log.sensors && v.sensors_enabled) {
      for (SensorIndex s : {SensorIndex::Accel, SensorIndex::Gyro, SensorIndex::Mag,
                            SensorIndex::Baro, SensorIndex::GpsPos, SensorIndex::GpsVel}) {
        f.sensors[s] = open(prefix + sensor_file_stem(s) + ".csv", sensor_header(s));
      }
    }
    if (cfg.log.camera && v.camera.enabled) {
      f.sensors[SensorIndex::Camera] =
          open(prefix + "camera.csv", "t,landmark_id,uL,vL,uR,vR\n");
    }
  }
  if (cfg.formation.enabled) {
    formation_ = open("formation.csv", "t,shape,max_error\n");
  }
}

LogBundle::~LogBundle() {
  try {
    close(0);
  } catch (...) {
    // Destructors must not throw; close() explicitly to see write errors.
  }
}

std::ofstream LogBundle::open(const std::string& name, const std::string& header) {
  std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot open " + (dir_ / name).string());
  }
  write(out, header);
  return out;
}

void LogBundle::write(std::ofstream& out, const std::string& line) {
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  if (!out) {
    throw Error(ErrorKind::IoError, "log write failed");
  }
}

LogBundle::VehicleFiles& LogBundle::files(int id) {
  const auto it = vehicles_.find(id);
  if (it == vehicles_.end()) {
    throw Error(ErrorKind::InvalidArgument, "no log files for vehicle " + std::to_string(id));
  }
  return it->second;
}

void LogBundle::ground_truth(int id, double t, const RigidBodyState& s) {
  write(files(id).gt, format_tum_line(Pose{t, s.p, s.q}));
}

void LogBundle::velocity(int id, double t, const Vec3& v_ref, const Vec3& v) {
  VehicleFiles& f = files(id);
  if (!f.velocity.is_open()) {
    return;
  }
  line_.clear();
  append_double(line_, t);
  for (double x : {v_ref.x(), v_ref.y(), v_ref.z(), v.x(), v.y(), v.z()}) {
    line_ += ',';
    append_double(line_, x);
  }
  line_ += '\n';
  write(f.velocity, line_);
}

void LogBundle::sensor(int id, SensorIndex which, double t, std::span<const double> truth,
                       std::span<const double> measured) {
  VehicleFiles& f = files(id);
  const auto it = f.sensors.find(which);
  if (it == f.sensors.end()) {
    return;
  }
  line_.clear();
  append_double(line_, t);
  for (double x : truth) {
    line_ += ',';
    append_double(line_, x);
  }
  for (double x : measured) {
    line_ += ',';
    append_double(line_, x);
  }
  line_ += '\n';
  write(it->second, line_);
}

void LogBundle::camera(int id, double t, const std::vector<StereoObservation>& obs) {
  VehicleFiles& f = files(id);
  const auto it = f.sensors.find(SensorIndex::Camera);
  if (it == f.sensors.end()) {
    return;
  }
  line_.clear();
  for (const StereoObservation& o : obs) {
    append_double(line_, t);
    line_ += ',';
    line_ += std::to_string(o.landmark_id);
    for (double x : {o.uL, o.vL, o.uR, o.vR}) {
      line_ += ',';
      append_double(line_, x);
    }
    line_ += '\n';
  }
  write(it->second, line_);
}

void LogBundle::formation(double t, const std::string& shape, double max_error) {
  if (!formation_.is_open()) {
    return;
  }
  line_.clear();
  append_double(line_, t);
  line_ += ',';
  line_ += shape;
  line_ += ',';
  append_double(line_, max_error);
  line_ += '\n';
  write(formation_, line_);
}

void LogBundle::command(std::uint64_t tick, const nlohmann::json& cmd) {
  commands_.push_back({{"tick", tick}, {"cmd", cmd}});
}

void LogBundle::close(std::uint64_t final_tick) {
  if (closed_) {
    return;
  }
  closed_ = true;
  {
    std::ofstream out = open("commands.json", "");
    const nlohmann::json transcript = {
        {"proto", 1}, {"seed", seed_}, {"commands", commands_}, {"final_tick", final_tick}};
    write(out, transcript.dump(2) + "\n");
  }
  bool ok = true;
  const auto finish = [&](std::ofstream& out) {
    if (out.is_open()) {
      out.flush();
      ok = ok && static_cast<bool>(out);
      out.close();
    }
  };
  for (auto& [id, f] : vehicles_) {
    finish(f.gt);
    finish(f.velocity);
    for (auto& [which, out] : f.sensors) {
      finish(out);
    }
  }
  finish(formation_);
  if (!ok) {
    throw Error(ErrorKind::IoError, "flushing logs in " + dir_.string() + " failed");
  }
}

}  // namespace swarmsim
