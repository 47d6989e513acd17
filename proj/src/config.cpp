#include "swarmsim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "swarmsim/error.hpp"

namespace swarmsim {

using nlohmann::json;

std::string to_string(Role role) {
  switch (role) {
    case Role::Leader: return "leader";
    case Role::Follower: return "follower";
    case Role::Solo: return "solo";
  }
  return "solo";
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ConfigError, where + ": " + what);
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) {
    fail(where, "expected a number");
  }
  return j.get<double>();
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where);

template <>
void read<double>(const json& obj, const char* key, double& out, const std::string& where) {
  if (obj.contains(key)) {
    out = get_number(obj.at(key), where + "/" + key);
  }
}

template <>
void read<bool>(const json& obj, const char* key, bool& out, const std::string& where) {
  if (obj.contains(key)) {
    if (!obj.at(key).is_boolean()) {
      fail(where + "/" + key, "expected a boolean");
    }
    out = obj.at(key).get<bool>();
  }
}

template <>
void read<int>(const json& obj, const char* key, int& out, const std::string& where) {
  if (obj.contains(key)) {
    if (!obj.at(key).is_number_integer()) {
      fail(where + "/" + key, "expected an integer");
    }
    out = obj.at(key).get<int>();
  }
}

Vec3 to_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    fail(where, "expected [x, y, z]");
  }
  return {get_number(j[0], where + "/0"), get_number(j[1], where + "/1"),
          get_number(j[2], where + "/2")};
}

void read_vec3(const json& obj, const char* key, Vec3& out, const std::string& where) {
  if (obj.contains(key)) {
    out = to_vec3(obj.at(key), where + "/" + key);
  }
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Infinite correlation time is written as null.
double read_corr_time(const json& j, const std::string& where) {
  if (j.is_null() || (j.is_string() && (j == "inf" || j == "infinity"))) {
    return std::numeric_limits<double>::infinity();
  }
  return get_number(j, where);
}

AxisNoiseSpec parse_axis(const json& j, AxisNoiseSpec spec, const std::string& where) {
  if (!j.is_object()) {
    fail(where, "expected an object");
  }
  read(j, "noise_density", spec.noise_density, where);
  read(j, "random_walk", spec.random_walk, where);
  read(j, "turn_on_bias_sigma", spec.turn_on_bias_sigma, where);
  if (j.contains("bias_corr_time")) {
    spec.bias_corr_time = read_corr_time(j.at("bias_corr_time"), where + "/bias_corr_time");
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    fail(where, e.what());
  }
  return spec;
}

json axis_json(const AxisNoiseSpec& s) {
  return {{"noise_density", s.noise_density},
          {"random_walk", s.random_walk},
          {"bias_corr_time", std::isfinite(s.bias_corr_time) ? json(s.bias_corr_time) : json()},
          {"turn_on_bias_sigma", s.turn_on_bias_sigma}};
}

// A channel is either one object for all axes or an array with one per axis.
template <std::size_t N>
void parse_channel(const json& obj, const char* key, NoisyChannel<N>& ch, const std::string& where) {
  if (!obj.contains(key)) {
    return;
  }
  const json& j = obj.at(key);
  const std::string w = where + "/" + key;
  if (j.is_array()) {
    if (j.size() != N) {
      fail(w, "expected " + std::to_string(N) + " per-axis entries");
    }
    for (std::size_t i = 0; i < N; ++i) {
      ch.spec[i] = parse_axis(j[i], ch.spec[i], w + "/" + std::to_string(i));
    }
  } else {
    for (std::size_t i = 0; i < N; ++i) {
      ch.spec[i] = parse_axis(j, ch.spec[i], w);
    }
  }
}

template <std::size_t N>
json channel_json(const NoisyChannel<N>& ch) {
  json arr = json::array();
  for (const AxisNoiseSpec& s : ch.spec) {
    arr.push_back(axis_json(s));
  }
  return arr;
}

void parse_pid(const json& j, PidGains& g, const std::string& where) {
  read_vec3(j, "kp", g.kp, where);
  read_vec3(j, "ki", g.ki, where);
  read_vec3(j, "kd", g.kd, where);
  read_vec3(j, "i_limit", g.i_limit, where);
  read(j, "output_limit", g.output_limit, where);
}

json pid_json(const PidGains& g) {
  return {{"kp", vec3_json(g.kp)},
          {"ki", vec3_json(g.ki)},
          {"kd", vec3_json(g.kd)},
          {"i_limit", vec3_json(g.i_limit)},
          {"output_limit", g.output_limit}};
}

void parse_gains(const json& j, ControllerGains& g, const std::string& where) {
  read_vec3(j, "pos_kp", g.pos_kp, where);
  read(j, "max_speed_xy", g.max_speed_xy, where);
  read(j, "max_speed_z", g.max_speed_z, where);
  if (j.contains("vel")) parse_pid(j.at("vel"), g.vel, where + "/vel");
  read(j, "max_tilt", g.max_tilt, where);
  read_vec3(j, "att_kp", g.att_kp, where);
  read(j, "max_rate", g.max_rate, where);
  if (j.contains("rate")) parse_pid(j.at("rate"), g.rate, where + "/rate");
  read(j, "takeoff_speed", g.takeoff_speed, where);
  read(j, "land_speed", g.land_speed, where);
  try {
    validate(g);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

json gains_json(const ControllerGains& g) {
  return {{"pos_kp", vec3_json(g.pos_kp)}, {"max_speed_xy", g.max_speed_xy},
          {"max_speed_z", g.max_speed_z},  {"vel", pid_json(g.vel)},
          {"max_tilt", g.max_tilt},        {"att_kp", vec3_json(g.att_kp)},
          {"max_rate", g.max_rate},        {"rate", pid_json(g.rate)},
          {"takeoff_speed", g.takeoff_speed}, {"land_speed", g.land_speed}};
}

void parse_blade(const json& j, BladeGeometry& b, const std::string& where) {
  read(j, "rho", b.rho, where);
  read(j, "Ct0", b.Ct0, where);
  read(j, "Cd0", b.Cd0, where);
  read(j, "Cm0", b.Cm0, where);
  read(j, "theta0", b.theta0, where);
  read(j, "theta1", b.theta1, where);
  read(j, "k_lift", b.k_lift, where);
  read(j, "d", b.d, where);
  read(j, "n_blades", b.n_blades, where);
  read(j, "c_chord", b.c_chord, where);
}

json blade_json(const BladeGeometry& b) {
  return {{"rho", b.rho},       {"Ct0", b.Ct0},         {"Cd0", b.Cd0},
          {"Cm0", b.Cm0},       {"theta0", b.theta0},   {"theta1", b.theta1},
          {"k_lift", b.k_lift}, {"d", b.d},             {"n_blades", b.n_blades},
          {"c_chord", b.c_chord}};
}

void parse_intrinsics(const json& j, CameraIntrinsics& c, const std::string& where) {
  read(j, "width", c.width, where);
  read(j, "height", c.height, where);
  read(j, "fx", c.fx, where);
  read(j, "fy", c.fy, where);
  read(j, "cx", c.cx, where);
  read(j, "cy", c.cy, where);
  read(j, "skew", c.skew, where);
  read(j, "k1", c.k1, where);
  read(j, "k2", c.k2, where);
  read(j, "k3", c.k3, where);
  read(j, "p1", c.p1, where);
  read(j, "p2", c.p2, where);
  read(j, "noise_mean", c.noise_mean, where);
  read(j, "noise_stddev", c.noise_stddev, where);
  read(j, "near", c.near, where);
  read(j, "far", c.far, where);
  read(j, "baseline", c.baseline, where);
  try {
    validate(c);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

json intrinsics_json(const CameraIntrinsics& c) {
  return {{"width", c.width},   {"height", c.height}, {"fx", c.fx},
          {"fy", c.fy},         {"cx", c.cx},         {"cy", c.cy},
          {"skew", c.skew},     {"k1", c.k1},         {"k2", c.k2},
          {"k3", c.k3},         {"p1", c.p1},         {"p2", c.p2},
          {"noise_mean", c.noise_mean}, {"noise_stddev", c.noise_stddev},
          {"near", c.near},     {"far", c.far},       {"baseline", c.baseline}};
}

Role parse_role(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  const auto s = j.get<std::string>();
  if (s == "solo") return Role::Solo;
  if (s == "leader") return Role::Leader;
  if (s == "follower") return Role::Follower;
  fail(where, "role must be solo, leader or follower");
}

VehicleConfig parse_vehicle(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  VehicleConfig v;
  v.sensors = default_sensor_rig();
  read(j, "id", v.id, where);
  if (j.contains("role")) v.role = parse_role(j.at("role"), where + "/role");
  if (j.contains("position")) {
    v.position = to_vec3(j.at("position"), where + "/position");
    v.position_given = true;
  }
  read(j, "yaw", v.yaw, where);
  read(j, "airborne", v.airborne, where);
  if (j.contains("blade")) parse_blade(j.at("blade"), v.blade, where + "/blade");
  read(j, "arm", v.arm, where);
  read(j, "omega_max", v.omega_max, where);
  read(j, "mass", v.mass, where);
  if (j.contains("inertia")) {
    const json& in = j.at("inertia");
    const std::string w = where + "/inertia";
    if (in.is_array() && in.size() == 3 && in[0].is_number()) {
      v.inertia = Mat3(to_vec3(in, w).asDiagonal());
    } else if (in.is_array() && in.size() == 3) {
      for (int r = 0; r < 3; ++r) {
        v.inertia.row(r) = to_vec3(in[r], w + "/" + std::to_string(r)).transpose();
      }
    } else {
      fail(w, "expected [ixx, iyy, izz] or a 3x3 matrix");
    }
  }
  if (j.contains("drag")) {
    const json& d = j.at("drag");
    read(d, "enabled", v.drag.enabled, where + "/drag");
    read(d, "Cd_body", v.drag.Cd_body, where + "/drag");
    read(d, "area", v.drag.area, where + "/drag");
    read(d, "rho", v.drag.rho, where + "/drag");
    if (v.drag.Cd_body < 0.0 || v.drag.area < 0.0) fail(where + "/drag", "must be >= 0");
  }
  read(j, "motor_tau", v.motor_tau, where);
  if (j.contains("gains")) parse_gains(j.at("gains"), v.gains, where + "/gains");
  if (j.contains("sensors")) {
    const json& s = j.at("sensors");
    const std::string w = where + "/sensors";
    read(s, "enabled", v.sensors_enabled, w);
    parse_channel(s, "accel", v.sensors.accel, w);
    parse_channel(s, "gyro", v.sensors.gyro, w);
    parse_channel(s, "mag", v.sensors.mag, w);
    parse_channel(s, "baro", v.sensors.baro, w);
    parse_channel(s, "gps_pos", v.sensors.gps_pos, w);
    parse_channel(s, "gps_vel", v.sensors.gps_vel, w);
  }
  if (j.contains("camera")) {
    const json& c = j.at("camera");
    const std::string w = where + "/camera";
    read(c, "enabled", v.camera.enabled, w);
    parse_intrinsics(c, v.camera.intrinsics, w);
    read_vec3(c, "offset", v.camera.offset, w);
    if (c.contains("mount")) {
      const json& m = c.at("mount");
      if (!m.is_array() || m.size() != 4) fail(w + "/mount", "expected [w, x, y, z]");
      v.camera.mount = UnitQuat(get_number(m[0], w), get_number(m[1], w), get_number(m[2], w),
                                get_number(m[3], w));
    }
  }
  return v;
}

json vehicle_json(const VehicleConfig& v) {
  json inertia = json::array();
  for (int r = 0; r < 3; ++r) {
    inertia.push_back(vec3_json(v.inertia.row(r).transpose()));
  }
  json j = {
      {"id", v.id},
      {"role", to_string(v.role)},
      {"yaw", v.yaw},
      {"airborne", v.airborne},
      {"blade", blade_json(v.blade)},
      {"arm", v.arm},
      {"omega_max", v.omega_max},
      {"mass", v.mass},
      {"inertia", inertia},
      {"drag",
       {{"enabled", v.drag.enabled}, {"Cd_body", v.drag.Cd_body}, {"area", v.drag.area},
        {"rho", v.drag.rho}}},
      {"motor_tau", v.motor_tau},
      {"gains", gains_json(v.gains)},
      {"sensors",
       {{"enabled", v.sensors_enabled},
        {"accel", channel_json(v.sensors.accel)},
        {"gyro", channel_json(v.sensors.gyro)},
        {"mag", channel_json(v.sensors.mag)},
        {"baro", channel_json(v.sensors.baro)},
        {"gps_pos", channel_json(v.sensors.gps_pos)},
        {"gps_vel", channel_json(v.sensors.gps_vel)}}},
  };
  json cam = intrinsics_json(v.camera.intrinsics);
  cam["enabled"] = v.camera.enabled;
  cam["offset"] = vec3_json(v.camera.offset);
  cam["mount"] = json::array({v.camera.mount.w(), v.camera.mount.x(), v.camera.mount.y(),
                              v.camera.mount.z()});
  j["camera"] = cam;
  if (v.position_given) {
    j["position"] = vec3_json(v.position);
  }
  return j;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

VehicleParams make_vehicle_params(const VehicleConfig& vc, double gravity) {
  VehicleParams vp{MassProperties(vc.mass, vc.inertia), {}, vc.drag, vc.motor_tau, gravity};
  const CoeffDerivation derived = derive_coeffs(vc.blade);
  vp.rotors = quad_x_layout(vc.arm, derived.coeffs, vc.omega_max);
  return vp;
}

SensorRig default_sensor_rig() {
  SensorRig rig;
  // Values in the range of consumer MEMS datasheets (artifact-chosen).
  const AxisNoiseSpec accel{0.0019, 3.0e-4, 300.0, 0.02};
  const AxisNoiseSpec gyro{1.7e-4, 2.0e-5, 1000.0, 0.003};
  const AxisNoiseSpec mag{0.0004, 6.4e-6, 600.0, 0.005};
  const AxisNoiseSpec baro{0.01, 0.0005, std::numeric_limits<double>::infinity(), 0.0};
  const AxisNoiseSpec gps_pos{0.3, 0.0, std::numeric_limits<double>::infinity(), 0.0};
  const AxisNoiseSpec gps_vel{0.05, 0.0, std::numeric_limits<double>::infinity(), 0.0};
  rig.accel.spec.fill(accel);
  rig.gyro.spec.fill(gyro);
  rig.mag.spec.fill(mag);
  rig.baro.spec.fill(baro);
  rig.gps_pos.spec.fill(gps_pos);
  rig.gps_vel.spec.fill(gps_vel);
  return rig;
}

SimConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail("", "config must be a JSON object");
  SimConfig cfg;
  if (j.contains("dt")) {
    cfg.dt = Rational::from_seconds(get_number(j.at("dt"), "/dt"));
  }
  read(j, "duration", cfg.duration, "");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
      fail("/seed", "expected a non-negative integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("realtime_factor")) {
    const json& r = j.at("realtime_factor");
    if (r.is_string() && r == "unbounded") {
      cfg.realtime_factor.reset();
    } else {
      const double f = get_number(r, "/realtime_factor");
      if (!(f > 0.0)) fail("/realtime_factor", "must be positive or \"unbounded\"");
      cfg.realtime_factor = f;
    }
  }
  read(j, "gravity", cfg.gravity, "");

  SensorRates sensor_rates;
  if (j.contains("rates")) {
    const json& r = j.at("rates");
    read(r, "control", cfg.rates.control, "/rates");
    read(r, "telemetry", cfg.rates.telemetry, "/rates");
    read(r, "log", cfg.rates.log, "/rates");
    read(r, "formation", cfg.rates.formation, "/rates");
    read(r, "imu", sensor_rates.imu, "/rates");
    read(r, "mag", sensor_rates.mag, "/rates");
    read(r, "baro", sensor_rates.baro, "/rates");
    read(r, "gps", sensor_rates.gps, "/rates");
    read(r, "camera", sensor_rates.camera, "/rates");
  }

  if (j.contains("world")) {
    const json& w = j.at("world");
    if (w.contains("landmarks")) {
      const json& lm = w.at("landmarks");
      if (lm.is_string()) {
        cfg.world.landmark_file = resolve(base_dir, lm.get<std::string>());
      } else if (lm.is_object() && lm.contains("generate")) {
        const json& g = lm.at("generate");
        LandmarkGenerator gen;
        if (g.contains("n")) gen.n = g.at("n").get<std::size_t>();
        read_vec3(g, "min", gen.lo, "/world/landmarks/generate");
        read_vec3(g, "max", gen.hi, "/world/landmarks/generate");
        if (g.contains("seed")) gen.seed = g.at("seed").get<std::uint64_t>();
        cfg.world.generator = gen;
      } else {
        fail("/world/landmarks", "expected a file path or {\"generate\": {...}}");
      }
    }
    read(w, "mag_declination", cfg.world.mag_declination, "/world");
    read(w, "mag_inclination", cfg.world.mag_inclination, "/world");
    read_vec3(w, "origin", cfg.world.origin, "/world");
  }

  if (j.contains("formation")) {
    const json& f = j.at("formation");
    FormationConfig& fc = cfg.formation;
    read(f, "enabled", fc.enabled, "/formation");
    if (f.contains("shapes")) {
      fc.shapes.clear();
      for (const json& s : f.at("shapes")) {
        if (!s.is_string()) fail("/formation/shapes", "expected shape names");
        fc.shapes.push_back(s.get<std::string>());
      }
    }
    read(f, "phase_duration", fc.phase_duration, "/formation");
    if (f.contains("law")) {
      const json& l = f.at("law");
      read(l, "kp", fc.law.kp, "/formation/law");
      read(l, "kd", fc.law.kd, "/formation/law");
      read(l, "a_max", fc.law.a_max, "/formation/law");
      read(l, "v_max", fc.law.v_max, "/formation/law");
    }
    if (f.contains("assignment")) {
      const auto a = f.at("assignment").get<std::string>();
      if (a == "identity") {
        fc.assignment = AssignmentPolicy::Identity;
      } else if (a == "min_distance") {
        fc.assignment = AssignmentPolicy::MinTotalDistance;
      } else {
        fail("/formation/assignment", "expected identity or min_distance");
      }
    }
    if (f.contains("link_delay_ticks")) fc.link_delay_ticks = f.at("link_delay_ticks").get<std::size_t>();
    read(f, "d_safe", fc.d_safe, "/formation");
    if (f.contains("shape_files")) {
      for (const auto& [name, path] : f.at("shape_files").items()) {
        fc.shape_files[name] = resolve(base_dir, path.get<std::string>());
      }
    }
  }

  if (j.contains("log")) {
    const json& l = j.at("log");
    if (l.contains("dir") && !l.at("dir").is_null()) {
      cfg.log.dir = resolve(base_dir, l.at("dir").get<std::string>());
    }
    read(l, "sensors", cfg.log.sensors, "/log");
    read(l, "camera", cfg.log.camera, "/log");
    read(l, "velocity", cfg.log.velocity, "/log");
  }
  if (j.contains("serve") && !j.at("serve").is_null()) {
    cfg.serve_port = j.at("serve").get<int>();
  }

  const json defaults = j.value("vehicle_defaults", json::object());
  if (!j.contains("vehicles") || !j.at("vehicles").is_array() || j.at("vehicles").empty()) {
    fail("/vehicles", "expected a non-empty array");
  }
  std::size_t idx = 0;
  for (const json& entry : j.at("vehicles")) {
    json merged = defaults;
    merged.merge_patch(entry);
    const std::string where = "/vehicles/" + std::to_string(idx);
    VehicleConfig vc = parse_vehicle(merged, where);
    if (!entry.contains("id")) {
      vc.id = static_cast<int>(idx);
    }
    vc.sensors.rates = sensor_rates;
    cfg.vehicles.push_back(vc);
    ++idx;
  }

  // Followers without explicit positions start on their first-shape slot.
  if (cfg.formation.enabled) {
    const auto shapes = resolve_shapes(cfg.formation);
    const auto first_it =
        cfg.formation.shapes.empty() ? shapes.end() : shapes.find(cfg.formation.shapes.front());
    if (first_it == shapes.end()) {
      fail("/formation/shapes", "unknown or missing first shape");
    }
    const FormationShape& first = first_it->second;
    const VehicleConfig* leader = nullptr;
    for (const VehicleConfig& v : cfg.vehicles) {
      if (v.role == Role::Leader) leader = &v;
    }
    if (leader != nullptr) {
      const Vec3 lp = leader->position;
      std::size_t slot = 0;
      for (VehicleConfig& v : cfg.vehicles) {
        if (v.role != Role::Follower) continue;
        if (!v.position_given && slot < first.offsets.size()) {
          v.position = lp + first.offsets[slot];
        }
        ++slot;
      }
    }
  }
  validate(cfg);
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::ConfigError, "cannot open config " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json config_to_json(const SimConfig& cfg) {
  json j;
  j["dt"] = cfg.dt.value();
  j["duration"] = cfg.duration;
  j["seed"] = cfg.seed;
  j["realtime_factor"] = cfg.realtime_factor ? json(*cfg.realtime_factor) : json("unbounded");
  j["gravity"] = cfg.gravity;
  const SensorRates sr = cfg.vehicles.empty() ? SensorRates{} : cfg.vehicles.front().sensors.rates;
  j["rates"] = {{"control", cfg.rates.control}, {"telemetry", cfg.rates.telemetry},
                {"log", cfg.rates.log},         {"formation", cfg.rates.formation},
                {"imu", sr.imu},                {"mag", sr.mag},
                {"baro", sr.baro},              {"gps", sr.gps},
                {"camera", sr.camera}};
  json world = {{"mag_declination", cfg.world.mag_declination},
                {"mag_inclination", cfg.world.mag_inclination},
                {"origin", vec3_json(cfg.world.origin)}};
  if (cfg.world.landmark_file) {
    world["landmarks"] = cfg.world.landmark_file->string();
  } else if (cfg.world.generator) {
    const LandmarkGenerator& g = *cfg.world.generator;
    world["landmarks"] = {{"generate",
                           {{"n", g.n}, {"min", vec3_json(g.lo)}, {"max", vec3_json(g.hi)},
                            {"seed", g.seed}}}};
  }
  j["world"] = world;
  const FormationConfig& fc = cfg.formation;
  json files = json::object();
  for (const auto& [name, path] : fc.shape_files) {
    files[name] = path.string();
  }
  j["formation"] = {
      {"enabled", fc.enabled},
      {"shapes", fc.shapes},
      {"phase_duration", fc.phase_duration},
      {"law", {{"kp", fc.law.kp}, {"kd", fc.law.kd}, {"a_max", fc.law.a_max}, {"v_max", fc.law.v_max}}},
      {"assignment", fc.assignment == AssignmentPolicy::Identity ? "identity" : "min_distance"},
      {"link_delay_ticks", fc.link_delay_ticks},
      {"d_safe", fc.d_safe},
      {"shape_files", files}};
  j["log"] = {{"dir", cfg.log.dir ? json(cfg.log.dir->string()) : json()},
              {"sensors", cfg.log.sensors},
              {"camera", cfg.log.camera},
              {"velocity", cfg.log.velocity}};
  j["serve"] = cfg.serve_port ? json(*cfg.serve_port) : json();
  json vehicles = json::array();
  for (const VehicleConfig& v : cfg.vehicles) {
    json vj = vehicle_json(v);
    vj["position"] = vec3_json(v.position);
    vehicles.push_back(vj);
  }
  j["vehicles"] = vehicles;
  return j;
}

std::map<std::string, FormationShape> resolve_shapes(const FormationConfig& fc) {
  std::map<std::string, FormationShape> out;
  for (const auto& [name, path] : fc.shape_files) {
    out[name] = read_shape(path, name);
  }
  for (const char* builtin : {"cube", "pyramid", "triangle"}) {
    if (!out.contains(builtin)) {
      out[builtin] = builtin_shape(builtin);
    }
  }
  return out;
}

void validate(const SimConfig& cfg) {
  const auto check_rate = [&](double hz, const std::string& name) {
    if (!steps_per_period(cfg.dt, hz)) {
      fail("/rates/" + name, "rate " + std::to_string(hz) + " Hz does not divide the physics rate");
    }
  };
  check_rate(cfg.rates.control, "control");
  // Telemetry only paces outbound frames and is rounded to whole ticks.
  if (!(cfg.rates.telemetry >= 0.0)) fail("/rates/telemetry", "must be >= 0");
  check_rate(cfg.rates.log, "log");
  check_rate(cfg.rates.formation, "formation");
  if (!(cfg.duration >= 0.0)) fail("/duration", "must be >= 0");
  if (!(cfg.gravity > 0.0)) fail("/gravity", "must be positive");

  std::set<int> ids;
  int leaders = 0;
  int followers = 0;
  for (const VehicleConfig& v : cfg.vehicles) {
    const std::string where = "/vehicles/id=" + std::to_string(v.id);
    if (!ids.insert(v.id).second) fail(where, "duplicate vehicle id");
    if (v.id < 0) fail(where, "ids must be non-negative");
    leaders += v.role == Role::Leader;
    followers += v.role == Role::Follower;
    const SensorRates& r = v.sensors.rates;
    check_rate(r.imu, "imu");
    check_rate(r.mag, "mag");
    check_rate(r.baro, "baro");
    check_rate(r.gps, "gps");
    check_rate(r.camera, "camera");
    try {
      (void)make_vehicle_params(v, cfg.gravity);
      (void)Mixer(make_vehicle_params(v, cfg.gravity).rotors);
    } catch (const Error& e) {
      fail(where, e.what());
    }
  }
  if (cfg.formation.enabled) {
    if (leaders != 1) fail("/formation", "formation needs exactly one leader");
    if (cfg.formation.shapes.empty()) fail("/formation/shapes", "needs at least one shape");
    try {
      validate(cfg.formation.law);
    } catch (const Error& e) {
      fail("/formation/law", e.what());
    }
    const auto shapes = resolve_shapes(cfg.formation);
    for (const std::string& name : cfg.formation.shapes) {
      const auto it = shapes.find(name);
      if (it == shapes.end()) fail("/formation/shapes", "unknown shape '" + name + "'");
      if (it->second.offsets.size() != static_cast<std::size_t>(followers)) {
        fail("/formation/shapes", "shape '" + name + "' has " +
                                      std::to_string(it->second.offsets.size()) +
                                      " slots but there are " + std::to_string(followers) +
                                      " followers");
      }
      try {
        validate(it->second, cfg.formation.d_safe);
      } catch (const Error& e) {
        fail("/formation/shapes", e.what());
      }
    }
  }
}

SimConfig make_hover_config(double altitude) {
  json j = {{"vehicles", json::array({{{"id", 0}, {"position", {0.0, 0.0, altitude}}}})}};
  return parse_config(j);
}

SimConfig make_formation_config(const std::vector<std::string>& shapes, double phase_duration,
                                std::size_t followers) {
  json vehicles = json::array();
  vehicles.push_back({{"id", 0}, {"role", "leader"}, {"position", {0.0, 0.0, 5.0}}});
  for (std::size_t i = 0; i < followers; ++i) {
    vehicles.push_back({{"id", static_cast<int>(i + 1)}, {"role", "follower"}});
  }
  json j = {{"vehicles", vehicles},
            {"formation",
             {{"enabled", true}, {"shapes", shapes}, {"phase_duration", phase_duration}}}};
  return parse_config(j);
}

}  // namespace swarmsim
