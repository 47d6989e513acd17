#include "swarmsim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "swarmsim/error.hpp"
#include "swarmsim/log_bundle.hpp"
#include "swarmsim/protocol.hpp"

namespace swarmsim {

bool affects_world(const CommandPayload& payload) {
  return std::holds_alternative<VelocitySetpointCmd>(payload) ||
         std::holds_alternative<SetShapeCmd>(payload) ||
         std::holds_alternative<TakeOffCmd>(payload) || std::holds_alternative<LandCmd>(payload);
}

namespace {

std::int64_t period_or_throw(const Rational& dt, double hz, const char* what) {
  const auto p = steps_per_period(dt, hz);
  if (!p) {
    throw Error(ErrorKind::ConfigError, std::string(what) + " rate does not divide physics rate");
  }
  return *p;
}

std::array<double, 3> arr(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

VehicleRuntime make_runtime(const VehicleConfig& vc, const SimConfig& cfg) {
  VehicleParams params = make_vehicle_params(vc, cfg.gravity);
  Mixer mixer(params.rotors);
  VehicleRuntime v{vc, params, std::move(mixer), {}, {}, {}, {}, vc.sensors, {}, false};
  v.state.p = vc.position;
  v.state.q = UnitQuat::from_yaw(vc.yaw);
  if (vc.airborne) {
    v.omega.assign(params.rotors.size(), hover_omega(params));
    v.setpoint = Setpoint::hold(vc.position, vc.yaw);
  } else {
    v.omega.assign(params.rotors.size(), 0.0);
    v.setpoint = Setpoint::land();
    v.on_ground = vc.position.z() <= 0.0;
  }
  for (std::size_t i = 0; i < v.rng.size(); ++i) {
    v.rng[i] = std::make_unique<RngStream>(
        cfg.seed, sensor_stream_id(static_cast<std::uint64_t>(vc.id), i));
  }
  auto& rng = v.rng;
  v.rig.accel.init(*rng[static_cast<std::size_t>(SensorIndex::Accel)]);
  v.rig.gyro.init(*rng[static_cast<std::size_t>(SensorIndex::Gyro)]);
  v.rig.mag.init(*rng[static_cast<std::size_t>(SensorIndex::Mag)]);
  v.rig.baro.init(*rng[static_cast<std::size_t>(SensorIndex::Baro)]);
  v.rig.gps_pos.init(*rng[static_cast<std::size_t>(SensorIndex::GpsPos)]);
  v.rig.gps_vel.init(*rng[static_cast<std::size_t>(SensorIndex::GpsVel)]);
  return v;
}

}  // namespace

Simulator::Simulator(SimConfig cfg, LogBundle* log)
    : cfg_(std::move(cfg)),
      log_(log),
      clock_(cfg_.dt, cfg_.realtime_factor),
      link_(cfg_.formation.link_delay_ticks) {
  validate(cfg_);
  ctrl_period_ = period_or_throw(cfg_.dt, cfg_.rates.control, "control");
  log_period_ = period_or_throw(cfg_.dt, cfg_.rates.log, "log");
  formation_period_ = period_or_throw(cfg_.dt, cfg_.rates.formation, "formation");

  // Vehicles tick in id order regardless of listing order.
  std::vector<VehicleConfig> sorted = cfg_.vehicles;
  std::sort(sorted.begin(), sorted.end(),
            [](const VehicleConfig& a, const VehicleConfig& b) { return a.id < b.id; });
  for (const VehicleConfig& vc : sorted) {
    vehicles_.push_back(make_runtime(vc, cfg_));
  }
  const SensorRates& r = vehicles_.front().rig.rates;
  imu_period_ = period_or_throw(cfg_.dt, r.imu, "imu");
  mag_period_ = period_or_throw(cfg_.dt, r.mag, "mag");
  baro_period_ = period_or_throw(cfg_.dt, r.baro, "baro");
  gps_period_ = period_or_throw(cfg_.dt, r.gps, "gps");
  camera_period_ = period_or_throw(cfg_.dt, r.camera, "camera");

  mag_field_ = magnetic_field_enu(cfg_.world.mag_declination, cfg_.world.mag_inclination);
  if (cfg_.world.landmark_file) {
    landmarks_ = read_landmarks(*cfg_.world.landmark_file);
  } else if (cfg_.world.generator) {
    const LandmarkGenerator& g = *cfg_.world.generator;
    landmarks_ = generate_landmarks(g.n, g.lo, g.hi, g.seed);
  }

  if (cfg_.formation.enabled) {
    shapes_ = resolve_shapes(cfg_.formation);
    for (const auto& [name, shape] : shapes_) {
      if (shape.offsets.size() ==
          static_cast<std::size_t>(std::count_if(
              vehicles_.begin(), vehicles_.end(),
              [](const VehicleRuntime& v) { return v.cfg.role == Role::Follower; }))) {
        shape_names_.push_back(name);
      }
    }
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      if (vehicles_[i].cfg.role == Role::Leader) {
        leader_index_ = i;
      } else if (vehicles_[i].cfg.role == Role::Follower) {
        follower_index_.push_back(i);
      }
    }
    shape_ = cfg_.formation.shapes.front();
    slots_ = shapes_.at(shape_).offsets;
    if (cfg_.formation.phase_duration > 0.0) {
      phase_ticks_ = static_cast<std::int64_t>(
          std::llround(cfg_.formation.phase_duration / cfg_.dt.value()));
    }
    for (std::size_t k = 0; k < follower_index_.size(); ++k) {
      VehicleRuntime& f = vehicles_[follower_index_[k]];
      f.setpoint = Setpoint::velocity(Vec3::Zero());
    }
  }
}

Simulator::~Simulator() = default;

VehicleRuntime& Simulator::find(int id) {
  for (VehicleRuntime& v : vehicles_) {
    if (v.cfg.id == id) {
      return v;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown vehicle id " + std::to_string(id));
}

const VehicleRuntime& Simulator::vehicle(int id) const {
  return const_cast<Simulator*>(this)->find(id);
}

std::optional<std::string> Simulator::current_shape() const {
  if (!cfg_.formation.enabled) {
    return std::nullopt;
  }
  return shape_;
}

void Simulator::apply(const CommandPayload& payload) {
  if (!affects_world(payload)) {
    return;
  }
  if (const auto* c = std::get_if<VelocitySetpointCmd>(&payload)) {
    VehicleRuntime& v = find(c->id);
    Vec3 vel = c->v;
    if (c->frame == VelocityFrame::Body) {
      vel = rotate(UnitQuat::from_yaw(v.state.q.yaw()), vel);
    }
    v.setpoint = Setpoint::velocity(vel, c->yaw_rate);
  } else if (const auto* c = std::get_if<SetShapeCmd>(&payload)) {
    if (!cfg_.formation.enabled) {
      throw Error(ErrorKind::InvalidArgument, "formation is not enabled");
    }
    if (std::find(shape_names_.begin(), shape_names_.end(), c->name) == shape_names_.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown shape '" + c->name + "'");
    }
    switch_shape(c->name);
  } else if (const auto* c = std::get_if<TakeOffCmd>(&payload)) {
    VehicleRuntime& v = find(c->id);
    v.setpoint = Setpoint::takeoff(Vec3(v.state.p.x(), v.state.p.y(), c->altitude));
  } else if (const auto* c = std::get_if<LandCmd>(&payload)) {
    VehicleRuntime& v = find(c->id);
    v.setpoint = Setpoint::land(v.state.p);
  }
  if (log_ != nullptr) {
    log_->command(clock_.step_index(), command_to_json(payload));
  }
}

void Simulator::switch_shape(const std::string& name) {
  const FormationShape current{shape_, slots_};
  const FormationShape& target = shapes_.at(name);
  const auto assignment = reconfigure(current, target, cfg_.formation.assignment);
  for (const SlotAssignment& a : assignment) {
    slots_[a.follower_id] = a.new_offset;
  }
  shape_ = name;
}

double Simulator::formation_error() const {
  if (!leader_index_) {
    return 0.0;
  }
  const Vec3& pl = vehicles_[*leader_index_].state.p;
  double worst = 0.0;
  for (std::size_t k = 0; k < follower_index_.size(); ++k) {
    const Vec3& p = vehicles_[follower_index_[k]].state.p;
    worst = std::max(worst, (pl + slots_[k] - p).norm());
  }
  return worst;
}

void Simulator::formation_update() {
  const auto k = static_cast<std::int64_t>(clock_.step_index());
  if (phase_ticks_ > 0 && k > 0 && k % phase_ticks_ == 0 &&
      auto_phase_ + 1 < cfg_.formation.shapes.size()) {
    ++auto_phase_;
    switch_shape(cfg_.formation.shapes[auto_phase_]);
  }
  if (k % formation_period_ != 0 || !leader_index_) {
    return;
  }
  const VehicleRuntime& leader = vehicles_[*leader_index_];
  const LeaderMsg msg = link_.transmit(leader_broadcast(clock_.t(), leader.state, leader_accel_));
  for (std::size_t i = 0; i < follower_index_.size(); ++i) {
    VehicleRuntime& f = vehicles_[follower_index_[i]];
    const PointMassState self{f.state.p, f.state.v};
    f.setpoint = Setpoint::velocity(follower_velocity_ref(self, msg, slots_[i], cfg_.formation.law));
  }
  if (log_ != nullptr) {
    log_->formation(clock_.t(), shape_, formation_error());
  }
}

void Simulator::step_vehicle(VehicleRuntime& v) {
  const auto k = static_cast<std::int64_t>(clock_.step_index());
  const double dt = clock_.dt();
  const double t = clock_.t();
  const VehicleParams& vp = v.params;

  if (k % ctrl_period_ == 0) {
    outer_loop_step(v.state, v.setpoint, v.cfg.gains, vp, dt * static_cast<double>(ctrl_period_),
                    v.ctrl);
  }
  const MotorCommand cmd = inner_loop_step(v.state, v.cfg.gains, vp, v.mixer, dt, v.ctrl);
  for (std::size_t i = 0; i < v.omega.size(); ++i) {
    v.omega[i] = motor_lag_step(v.omega[i], cmd.omega_cmd[i], vp.motor_tau, dt);
  }

  const Vec3 v_body = rotate_inverse(v.state.q, v.state.v);
  const BodyWrench rotor = total_rotor_wrench(v.omega, vp.rotors, v_body);
  const NetWrench net =
      net_wrench(v.state, rotor.force, rotor.moment, vp.mass_props, vp.drag, vp.gravity);
  Vec3 accel = net.force_world / vp.mass_props.mass();
  // Resting on the ground: the contact force cancels a downward pull.
  if (v.on_ground && v.state.p.z() <= 0.0 && accel.z() <= 0.0) {
    accel = Vec3::Zero();
  }

  if (log_ != nullptr) {
    if (k % log_period_ == 0) {
      log_->ground_truth(v.cfg.id, t, v.state);
      log_->velocity(v.cfg.id, t, v.ctrl.vel_ref, v.state.v);
    }
    if (cfg_.log.sensors && v.cfg.sensors_enabled) {
      const auto rng = [&](SensorIndex s) -> RngStream& {
        return *v.rng[static_cast<std::size_t>(s)];
      };
      const auto period_dt = [&](std::int64_t p) { return dt * static_cast<double>(p); };
      if (k % imu_period_ == 0) {
        const ImuTruth imu = imu_truth(v.state, accel, vp.gravity);
        const auto ta = arr(imu.accel_body);
        const auto tg = arr(imu.gyro_body);
        const auto ma = v.rig.accel.measure(ta, period_dt(imu_period_), rng(SensorIndex::Accel));
        const auto mg = v.rig.gyro.measure(tg, period_dt(imu_period_), rng(SensorIndex::Gyro));
        log_->sensor(v.cfg.id, SensorIndex::Accel, t, ta, ma);
        log_->sensor(v.cfg.id, SensorIndex::Gyro, t, tg, mg);
      }
      const bool mag_due = k % mag_period_ == 0;
      const bool baro_due = k % baro_period_ == 0;
      const bool gps_due = k % gps_period_ == 0;
      if (mag_due || baro_due || gps_due) {
        const AuxTruth aux = mag_baro_gps_truth(v.state, mag_field_, cfg_.world.origin);
        if (mag_due) {
          const auto tm = arr(aux.mag_body);
          const auto mm = v.rig.mag.measure(tm, period_dt(mag_period_), rng(SensorIndex::Mag));
          log_->sensor(v.cfg.id, SensorIndex::Mag, t, tm, mm);
        }
        if (baro_due) {
          const std::array<double, 1> tb{aux.altitude};
          const auto mb = v.rig.baro.measure(tb, period_dt(baro_period_), rng(SensorIndex::Baro));
          log_->sensor(v.cfg.id, SensorIndex::Baro, t, tb, mb);
        }
        if (gps_due) {
          const auto tp = arr(aux.gps_pos);
          const auto tv = arr(aux.gps_vel);
          const auto mp =
              v.rig.gps_pos.measure(tp, period_dt(gps_period_), rng(SensorIndex::GpsPos));
          const auto mv =
              v.rig.gps_vel.measure(tv, period_dt(gps_period_), rng(SensorIndex::GpsVel));
          log_->sensor(v.cfg.id, SensorIndex::GpsPos, t, tp, mp);
          log_->sensor(v.cfg.id, SensorIndex::GpsVel, t, tv, mv);
        }
      }
    }
    if (cfg_.log.camera && v.cfg.camera.enabled && k % camera_period_ == 0) {
      const CameraConfig& cc = v.cfg.camera;
      const Pose body{t, v.state.p, v.state.q};
      const Pose cam = compose(body, Pose{t, cc.offset, cc.mount});
      const auto obs =
          stereo_observe(landmarks_, cam, cc.intrinsics, &*v.rng[static_cast<std::size_t>(SensorIndex::Camera)]);
      log_->camera(v.cfg.id, t, obs);
    }
  }

  if (leader_index_ && &v == &vehicles_[*leader_index_]) {
    leader_accel_ = accel;
  }

  if (v.on_ground && accel.z() <= 0.0 && v.state.p.z() <= 0.0) {
    // Stay put; motors are not producing enough lift to leave the ground.
    v.state.v = Vec3::Zero();
    v.state.omega = Vec3::Zero();
    return;
  }
  v.state = swarmsim::step(v.state, net.force_world, net.moment_body, vp.mass_props, dt);
  v.on_ground = apply_ground_clamp(v.state) || (v.on_ground && v.state.p.z() <= 0.0);
}

void Simulator::step() {
  if (cfg_.formation.enabled) {
    formation_update();
  }
  for (VehicleRuntime& v : vehicles_) {
    step_vehicle(v);
  }
  clock_.advance();
}

void Simulator::run(std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) {
    step();
  }
}

StateSnapshot Simulator::snapshot() const {
  StateSnapshot s;
  s.t = clock_.t();
  s.step = clock_.step_index();
  s.shape = current_shape();
  for (const VehicleRuntime& v : vehicles_) {
    s.uavs.push_back({v.cfg.id, v.cfg.role, v.state.p, v.state.v, v.state.q});
  }
  return s;
}

std::vector<PhaseReport> run_formation_scenario(const SimConfig& cfg, double tolerance,
                                                LogBundle* log) {
  if (!cfg.formation.enabled || !(cfg.formation.phase_duration > 0.0)) {
    throw Error(ErrorKind::ConfigError, "scenario needs formation with a phase duration");
  }
  Simulator sim(cfg, log);
  const std::int64_t phase_ticks =
      std::llround(cfg.formation.phase_duration / cfg.dt.value());
  const std::int64_t sample_ticks = *steps_per_period(cfg.dt, cfg.rates.formation);
  const std::int64_t ticks_10s = std::llround(10.0 / cfg.dt.value());
  std::vector<PhaseReport> phases;
  for (std::size_t phase = 0; phase < cfg.formation.shapes.size(); ++phase) {
    PhaseReport r;
    r.shape = cfg.formation.shapes[phase];
    r.start_time = sim.t();
    double last_bad = -1.0;
    bool ever_bad = false;
    for (std::int64_t k = 0; k < phase_ticks; ++k) {
      sim.step();
      const std::int64_t done = k + 1;
      if (done % sample_ticks == 0 || done == phase_ticks) {
        const double e = sim.formation_error();
        if (e >= tolerance) {
          ever_bad = true;
          last_bad = sim.t() - r.start_time;
        }
        if (done == ticks_10s) {
          r.error_at_10s = e;
        }
        r.final_error = e;
      }
    }
    if (!ever_bad) {
      r.settle_time = 0.0;
    } else if (r.final_error < tolerance) {
      r.settle_time = last_bad;
    }
    phases.push_back(r);
  }
  if (log != nullptr) {
    log->close(sim.step_index());
  }
  return phases;
}

}  // namespace swarmsim
