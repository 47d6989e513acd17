#pragma once

#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "swarmsim/simulator.hpp"

namespace swarmsim {

inline constexpr int kProtocolVersion = 1;

/// What inbound commands may refer to. Used to reject unknown ids and
/// shapes before anything reaches the simulation queue.
struct Roster {
  std::set<int> ids;
  std::set<std::string> shapes;
};

Roster make_roster(const Simulator& sim);

/// Inbound command frames (JSON objects, "proto" optional but must be 1):
///   {"type":"velocity","id":0,"v":[vx,vy,vz],"yaw_rate":0,"frame":"world"|"body"}
///   {"type":"set_shape","name":"pyramid"}
///   {"type":"pause"}  {"type":"resume"}  {"type":"step","n":5}
///   {"type":"set_rtf","factor":2.0}   factor may be "unbounded"
///   {"type":"takeoff","id":0,"altitude":2.0}  {"type":"land","id":0}
/// Throws Error(ParseError) for malformed frames and
/// Error(InvalidArgument) for ids/shapes not in `roster`.
CommandPayload parse_command(const nlohmann::json& frame, const Roster* roster = nullptr);
CommandPayload parse_command_text(const std::string& text, const Roster* roster = nullptr);

nlohmann::json command_to_json(const CommandPayload& payload);

/// {"type":"state","proto":1,"t":..,"step":..,"paused":..,"shape":..|null,
///  "uavs":[{"id":..,"role":..,"p":[x,y,z],"v":[..],"q":[w,x,y,z]}]}
nlohmann::json state_frame(const StateSnapshot& s);

/// {"type":"error","proto":1,"msg":...}
nlohmann::json error_frame(const std::string& msg);

/// Structural check of an outbound frame against the documented schema.
/// Returns a description of the first violation, or nullopt if valid.
std::optional<std::string> validate_frame(const nlohmann::json& frame);

}  // namespace swarmsim
