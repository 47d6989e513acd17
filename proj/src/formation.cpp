#include "swarmsim/formation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "swarmsim/error.hpp"
#include "swarmsim/text_io.hpp"

namespace swarmsim {

FormationShape cube_shape() {
  FormationShape s{"cube", {}};
  for (double z : {-1.0, 1.0}) {
    for (double y : {-1.0, 1.0}) {
      for (double x : {-1.0, 1.0}) {
        s.offsets.emplace_back(x, y, z);
      }
    }
  }
  return s;
}

FormationShape pyramid_shape() {
  return {"pyramid",
          {{1.0, 1.0, -1.0}, {-1.0, 1.0, -1.0}, {-1.0, -1.0, -1.0}, {1.0, -1.0, -1.0},
           {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}}};
}

FormationShape triangle_shape() {
  constexpr double side = 4.8;
  const double radius = side / std::sqrt(3.0);
  Vec3 corners[3];
  for (int i = 0; i < 3; ++i) {
    const double ang = std::numbers::pi / 2.0 + i * 2.0 * std::numbers::pi / 3.0;
    corners[i] = Vec3(radius * std::cos(ang), radius * std::sin(ang), 0.0);
  }
  FormationShape s{"triangle", {}};
  const double spacing = 3.0 * side / 8.0;
  for (int k = 0; k < 8; ++k) {
    const double along = k * spacing;
    const int edge = std::min(2, static_cast<int>(along / side));
    const double frac = (along - edge * side) / side;
    const Vec3& a = corners[edge];
    const Vec3& b = corners[(edge + 1) % 3];
    s.offsets.push_back(a + frac * (b - a));
  }
  return s;
}

FormationShape builtin_shape(const std::string& name) {
  if (name == "cube") return cube_shape();
  if (name == "pyramid") return pyramid_shape();
  if (name == "triangle") return triangle_shape();
  throw Error(ErrorKind::InvalidArgument, "unknown formation shape '" + name + "'");
}

double min_separation(const FormationShape& shape) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < shape.offsets.size(); ++i) {
    for (std::size_t j = i + 1; j < shape.offsets.size(); ++j) {
      best = std::min(best, (shape.offsets[i] - shape.offsets[j]).norm());
    }
  }
  return best;
}

void validate(const FormationShape& shape, double d_safe) {
  if (shape.offsets.empty()) {
    throw Error(ErrorKind::InvalidArgument, "shape '" + shape.name + "' has no followers");
  }
  for (const Vec3& o : shape.offsets) {
    if (!o.allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "shape '" + shape.name + "' has non-finite offset");
    }
  }
  const double sep = min_separation(shape);
  if (!(sep > 0.0) || sep < d_safe) {
    throw Error(ErrorKind::InvalidArgument,
                "shape '" + shape.name + "' violates minimum separation " + format_double(d_safe));
  }
}

FormationShape read_shape(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open shape file " + path.string());
  }
  std::vector<std::pair<long, Vec3>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#' || view.starts_with("follower_index")) {
      continue;
    }
    const auto fields = split(view, ',');
    double v[4];
    bool ok = fields.size() == 4;
    for (std::size_t i = 0; ok && i < 4; ++i) {
      ok = parse_double(fields[i], v[i]);
    }
    if (!ok || v[0] < 0.0 || std::floor(v[0]) != v[0]) {
      throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) +
                                             ": expected follower_index,dx,dy,dz");
    }
    rows.emplace_back(static_cast<long>(v[0]), Vec3(v[1], v[2], v[3]));
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  FormationShape shape{name, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != static_cast<long>(i)) {
      throw Error(ErrorKind::ParseError, path.string() + ": follower indices must be 0..n-1");
    }
    shape.offsets.push_back(rows[i].second);
  }
  return shape;
}

void write_shape(const std::filesystem::path& path, const FormationShape& shape) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write shape file " + path.string());
  }
  std::string buf = "follower_index,dx,dy,dz\n";
  for (std::size_t i = 0; i < shape.offsets.size(); ++i) {
    buf += std::to_string(i);
    for (int k = 0; k < 3; ++k) {
      buf += ',';
      append_double(buf, shape.offsets[i][k]);
    }
    buf += '\n';
  }
  out << buf;
}

void validate(const FollowerLaw& law) {
  if (!(law.kp > 0.0) || !(law.kd > 0.0) || !(law.a_max > 0.0) || !(law.v_max > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "follower law requires kp, kd, a_max, v_max > 0");
  }
}

LeaderMsg leader_broadcast(double t, const PointMassState& leader, const Vec3& a_leader) {
  return {t, leader.p, leader.v, a_leader};
}

LeaderMsg leader_broadcast(double t, const RigidBodyState& leader, const Vec3& a_leader) {
  return {t, leader.p, leader.v, a_leader};
}

namespace {

Vec3 limit_norm(const Vec3& v, double limit) {
  const double n = v.norm();
  return n > limit ? Vec3(v * (limit / n)) : v;
}

}  // namespace

Vec3 follower_accel(const PointMassState& self, const LeaderMsg& msg, const Vec3& offset,
                    const FollowerLaw& law) {
  const Vec3 u = msg.a + law.kp * ((msg.p + offset) - self.p) + law.kd * (msg.v - self.v);
  return limit_norm(u, law.a_max);
}

Vec3 follower_velocity_ref(const PointMassState& self, const LeaderMsg& msg, const Vec3& offset,
                           const FollowerLaw& law) {
  return limit_norm(self.v + follower_accel(self, msg, offset, law) / law.kd, law.v_max);
}

PointMassState point_mass_step(const PointMassState& s, const Vec3& u, const FollowerLaw& law,
                               double dt) {
  PointMassState n;
  n.v = limit_norm(s.v + u * dt, law.v_max);
  n.p = s.p + n.v * dt;
  return n;
}

std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost) {
  // Hungarian method with potentials, O(n^3). 1-based internal indexing.
  const std::size_t n = cost.size();
  for (const auto& row : cost) {
    if (row.size() != n) {
      throw Error(ErrorKind::InvalidArgument, "assignment cost matrix must be square");
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> result(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) {
      result[p[j] - 1] = j - 1;
    }
  }
  return result;
}

std::vector<SlotAssignment> reconfigure(const FormationShape& current,
                                        const FormationShape& target, AssignmentPolicy policy) {
  const std::size_t n = current.offsets.size();
  if (n != target.offsets.size()) {
    throw Error(ErrorKind::ShapeMismatch, "shapes '" + current.name + "' and '" + target.name +
                                              "' have different follower counts");
  }
  std::vector<SlotAssignment> out(n);
  if (policy == AssignmentPolicy::Identity) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = {i, target.offsets[i]};
    }
    return out;
  }
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost[i][j] = (current.offsets[i] - target.offsets[j]).norm();
    }
  }
  const std::vector<std::size_t> match = solve_assignment(cost);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {i, target.offsets[match[i]]};
  }
  return out;
}

LeaderMsg LeaderLink::transmit(const LeaderMsg& msg) {
  line_.push_back(msg);
  while (line_.size() > delay_ + 1) {
    line_.pop_front();
  }
  return line_.front();
}

LeaderScript::LeaderScript(std::vector<Waypoint> waypoints) : waypoints_(std::move(waypoints)) {
  if (waypoints_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "leader script needs at least one waypoint");
  }
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    if (!(waypoints_[i].t > waypoints_[i - 1].t)) {
      throw Error(ErrorKind::NonMonotonicTime, "leader waypoints must have increasing times");
    }
  }
}

PointMassState LeaderScript::sample(double t) const {
  if (t <= waypoints_.front().t) {
    return {waypoints_.front().p, Vec3::Zero()};
  }
  for (std::size_t i = 1; i < waypoints_.size(); ++i) {
    const Waypoint& a = waypoints_[i - 1];
    const Waypoint& b = waypoints_[i];
    if (t < b.t) {
      const double span = b.t - a.t;
      const Vec3 v = (b.p - a.p) / span;
      return {a.p + v * (t - a.t), v};
    }
  }
  return {waypoints_.back().p, Vec3::Zero()};
}

FastFormationSim::FastFormationSim(FastSimConfig cfg)
    : cfg_(std::move(cfg)), leader_(cfg_.leader_waypoints) {
  validate(cfg_.law);
  if (cfg_.shape_sequence.empty()) {
    throw Error(ErrorKind::InvalidArgument, "shape sequence is empty");
  }
  if (!(cfg_.dt > 0.0) || !(cfg_.phase_duration > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "dt and phase_duration must be positive");
  }
  const std::size_t n = cfg_.shape_sequence.front().offsets.size();
  for (const FormationShape& s : cfg_.shape_sequence) {
    if (s.offsets.size() != n) {
      throw Error(ErrorKind::ShapeMismatch, "all shapes in a sequence need equal follower counts");
    }
  }
  const PointMassState lead = leader_.sample(0.0);
  slots_ = cfg_.shape_sequence.front().offsets;
  for (const Vec3& o : slots_) {
    followers_.push_back({lead.p + o, lead.v});
  }
}

double FastFormationSim::max_error(const LeaderMsg& msg) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < followers_.size(); ++i) {
    worst = std::max(worst, (msg.p + slots_[i] - followers_[i].p).norm());
  }
  return worst;
}

FastSimReport FastFormationSim::run() {
  FastSimReport report;
  LeaderLink link(cfg_.link_delay_ticks);
  const auto steps_per_phase = static_cast<std::size_t>(std::llround(cfg_.phase_duration / cfg_.dt));
  const auto steps_at_10s = static_cast<std::size_t>(std::llround(10.0 / cfg_.dt));
  std::size_t step = 0;
  FormationShape current{"", slots_};
  for (std::size_t phase = 0; phase < cfg_.shape_sequence.size(); ++phase) {
    const FormationShape& target = cfg_.shape_sequence[phase];
    for (const SlotAssignment& a : reconfigure(current, target, cfg_.policy)) {
      slots_[a.follower_id] = a.new_offset;
    }
    current.offsets = slots_;
    PhaseReport pr;
    pr.shape = target.name;
    pr.start_time = static_cast<double>(step) * cfg_.dt;
    double last_violation = 0.0;
    bool ever_violated = false;
    LeaderMsg msg;
    for (std::size_t k = 0; k < steps_per_phase; ++k, ++step) {
      const double t = static_cast<double>(step) * cfg_.dt;
      const PointMassState lead = leader_.sample(t);
      const LeaderMsg truth = leader_broadcast(t, lead, Vec3::Zero());
      msg = link.transmit(truth);
      const double err = max_error(truth);
      if (err >= cfg_.error_tolerance) {
        ever_violated = true;
        last_violation = static_cast<double>(k + 1) * cfg_.dt;
      }
      if (k == steps_at_10s) {
        pr.error_at_10s = err;
      }
      for (std::size_t i = 0; i < followers_.size(); ++i) {
        const Vec3 u = follower_accel(followers_[i], msg, slots_[i], cfg_.law);
        followers_[i] = point_mass_step(followers_[i], u, cfg_.law, cfg_.dt);
      }
    }
    const double t_end = static_cast<double>(step) * cfg_.dt;
    const LeaderMsg end_msg = leader_broadcast(t_end, leader_.sample(t_end), Vec3::Zero());
    pr.final_error = max_error(end_msg);
    if (steps_at_10s >= steps_per_phase) {
      pr.error_at_10s = pr.final_error;
    }
    const bool settled = pr.final_error < cfg_.error_tolerance;
    pr.settle_time = settled ? (ever_violated ? last_violation : 0.0) : -1.0;
    report.phases.push_back(pr);
  }
  report.steps = step;
  report.final_followers = followers_;
  return report;
}

}  // namespace swarmsim
