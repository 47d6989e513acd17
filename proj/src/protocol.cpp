#include "swarmsim/protocol.hpp"

#include <cmath>

#include "swarmsim/error.hpp"

namespace swarmsim {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::ParseError, msg); }

double number(const json& frame, const char* key) {
  if (!frame.contains(key) || !frame.at(key).is_number()) {
    bad(std::string("'") + key + "' must be a number");
  }
  const double v = frame.at(key).get<double>();
  if (!std::isfinite(v)) {
    bad(std::string("'") + key + "' must be finite");
  }
  return v;
}

int vehicle_id(const json& frame, const Roster* roster) {
  if (!frame.contains("id") || !frame.at("id").is_number_integer()) {
    bad("'id' must be an integer");
  }
  const int id = frame.at("id").get<int>();
  if (roster != nullptr && !roster->ids.contains(id)) {
    throw Error(ErrorKind::InvalidArgument, "unknown vehicle id " + std::to_string(id));
  }
  return id;
}

Vec3 vec3(const json& frame, const char* key) {
  if (!frame.contains(key)) {
    bad(std::string("missing '") + key + "'");
  }
  const json& a = frame.at(key);
  if (!a.is_array() || a.size() != 3) {
    bad(std::string("'") + key + "' must be [x, y, z]");
  }
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!a[i].is_number() || !std::isfinite(a[i].get<double>())) {
      bad(std::string("'") + key + "' entries must be finite numbers");
    }
    out(i) = a[i].get<double>();
  }
  return out;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Roster make_roster(const Simulator& sim) {
  Roster r;
  for (const VehicleRuntime& v : sim.vehicles()) {
    r.ids.insert(v.cfg.id);
  }
  r.shapes.insert(sim.shape_names().begin(), sim.shape_names().end());
  return r;
}

CommandPayload parse_command(const json& frame, const Roster* roster) {
  if (!frame.is_object()) {
    bad("frame must be a JSON object");
  }
  if (frame.contains("proto") &&
      (!frame.at("proto").is_number_integer() || frame.at("proto").get<int>() != kProtocolVersion)) {
    bad("unsupported protocol version");
  }
  if (!frame.contains("type") || !frame.at("type").is_string()) {
    bad("missing 'type'");
  }
  const std::string type = frame.at("type").get<std::string>();
  if (type == "velocity") {
    VelocitySetpointCmd c;
    c.id = vehicle_id(frame, roster);
    c.v = vec3(frame, "v");
    if (frame.contains("yaw_rate")) {
      c.yaw_rate = number(frame, "yaw_rate");
    }
    if (frame.contains("frame")) {
      const json& f = frame.at("frame");
      if (f == "world") {
        c.frame = VelocityFrame::World;
      } else if (f == "body") {
        c.frame = VelocityFrame::Body;
      } else {
        bad("'frame' must be \"world\" or \"body\"");
      }
    }
    return c;
  }
  if (type == "set_shape") {
    if (!frame.contains("name") || !frame.at("name").is_string()) {
      bad("'name' must be a string");
    }
    SetShapeCmd c{frame.at("name").get<std::string>()};
    if (roster != nullptr && !roster->shapes.contains(c.name)) {
      throw Error(ErrorKind::InvalidArgument, "unknown shape '" + c.name + "'");
    }
    return c;
  }
  if (type == "pause") {
    return PauseCmd{};
  }
  if (type == "resume") {
    return ResumeCmd{};
  }
  if (type == "step") {
    StepCmd c;
    if (frame.contains("n")) {
      if (!frame.at("n").is_number_integer() || frame.at("n").get<std::int64_t>() < 1) {
        bad("'n' must be a positive integer");
      }
      c.n = frame.at("n").get<std::int64_t>();
    }
    return c;
  }
  if (type == "set_rtf") {
    if (!frame.contains("factor")) {
      bad("missing 'factor'");
    }
    const json& f = frame.at("factor");
    if (f == "unbounded") {
      return SetRtfCmd{std::nullopt};
    }
    const double x = number(frame, "factor");
    if (!(x > 0.0)) {
      bad("'factor' must be positive or \"unbounded\"");
    }
    return SetRtfCmd{x};
  }
  if (type == "takeoff") {
    TakeOffCmd c;
    c.id = vehicle_id(frame, roster);
    if (frame.contains("altitude")) {
      c.altitude = number(frame, "altitude");
      if (!(c.altitude > 0.0)) {
        bad("'altitude' must be positive");
      }
    }
    return c;
  }
  if (type == "land") {
    return LandCmd{vehicle_id(frame, roster)};
  }
  bad("unknown command type '" + type + "'");
}

CommandPayload parse_command_text(const std::string& text, const Roster* roster) {
  json frame;
  try {
    frame = json::parse(text);
  } catch (const json::parse_error&) {
    bad("frame is not valid JSON");
  }
  return parse_command(frame, roster);
}

json command_to_json(const CommandPayload& payload) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, VelocitySetpointCmd>) {
          return {{"type", "velocity"},
                  {"id", c.id},
                  {"v", vec_json(c.v)},
                  {"yaw_rate", c.yaw_rate},
                  {"frame", c.frame == VelocityFrame::Body ? "body" : "world"}};
        } else if constexpr (std::is_same_v<T, SetShapeCmd>) {
          return {{"type", "set_shape"}, {"name", c.name}};
        } else if constexpr (std::is_same_v<T, PauseCmd>) {
          return {{"type", "pause"}};
        } else if constexpr (std::is_same_v<T, ResumeCmd>) {
          return {{"type", "resume"}};
        } else if constexpr (std::is_same_v<T, StepCmd>) {
          return {{"type", "step"}, {"n", c.n}};
        } else if constexpr (std::is_same_v<T, SetRtfCmd>) {
          return {{"type", "set_rtf"}, {"factor", c.factor ? json(*c.factor) : json("unbounded")}};
        } else if constexpr (std::is_same_v<T, TakeOffCmd>) {
          return {{"type", "takeoff"}, {"id", c.id}, {"altitude", c.altitude}};
        } else {
          return {{"type", "land"}, {"id", c.id}};
        }
      },
      payload);
}

json state_frame(const StateSnapshot& s) {
  json uavs = json::array();
  for (const UavSnapshot& u : s.uavs) {
    uavs.push_back({{"id", u.id},
                    {"role", to_string(u.role)},
                    {"p", vec_json(u.p)},
                    {"v", vec_json(u.v)},
                    {"q", json::array({u.q.w(), u.q.x(), u.q.y(), u.q.z()})}});
  }
  return {{"type", "state"},
          {"proto", kProtocolVersion},
          {"t", s.t},
          {"step", s.step},
          {"paused", s.paused},
          {"shape", s.shape ? json(*s.shape) : json()},
          {"uavs", uavs}};
}

json error_frame(const std::string& msg) {
  return {{"type", "error"}, {"proto", kProtocolVersion}, {"msg", msg}};
}

std::optional<std::string> validate_frame(const json& frame) {
  if (!frame.is_object()) return "frame is not an object";
  if (!frame.contains("type") || !frame["type"].is_string()) return "missing string 'type'";
  if (!frame.contains("proto") || frame["proto"] != kProtocolVersion) return "'proto' must be 1";
  const std::string type = frame["type"];
  const auto is_vec = [](const json& a, std::size_t n) {
    if (!a.is_array() || a.size() != n) return false;
    for (const json& x : a) {
      if (!x.is_number()) return false;
    }
    return true;
  };
  if (type == "error") {
    if (!frame.contains("msg") || !frame["msg"].is_string()) return "error frame needs 'msg'";
    if (frame.size() != 3) return "error frame has extra members";
    return std::nullopt;
  }
  if (type != "state") return "unknown frame type '" + type + "'";
  for (const char* key : {"t", "step", "paused", "shape", "uavs"}) {
    if (!frame.contains(key)) return std::string("state frame missing '") + key + "'";
  }
  if (frame.size() != 7) return "state frame has extra members";
  if (!frame["t"].is_number() || frame["t"].get<double>() < 0.0) return "'t' must be >= 0";
  if (!frame["step"].is_number_unsigned() && !frame["step"].is_number_integer()) {
    return "'step' must be an integer";
  }
  if (!frame["paused"].is_boolean()) return "'paused' must be boolean";
  if (!frame["shape"].is_null() && !frame["shape"].is_string()) return "'shape' must be string|null";
  if (!frame["uavs"].is_array()) return "'uavs' must be an array";
  for (const json& u : frame["uavs"]) {
    if (!u.is_object() || u.size() != 5) return "uav entry must have id, role, p, v, q";
    if (!u.contains("id") || !u["id"].is_number_integer()) return "uav 'id' must be an integer";
    if (!u.contains("role") || !u["role"].is_string()) return "uav 'role' must be a string";
    const std::string role = u["role"];
    if (role != "leader" && role != "follower" && role != "solo") return "bad uav role";
    if (!u.contains("p") || !is_vec(u["p"], 3)) return "uav 'p' must be 3 numbers";
    if (!u.contains("v") || !is_vec(u["v"], 3)) return "uav 'v' must be 3 numbers";
    if (!u.contains("q") || !is_vec(u["q"], 4)) return "uav 'q' must be 4 numbers";
    double n2 = 0.0;
    for (const json& x : u["q"]) n2 += x.get<double>() * x.get<double>();
    if (std::abs(n2 - 1.0) > 1e-6) return "uav 'q' must be unit length";
  }
  return std::nullopt;
}

}  // namespace swarmsim
