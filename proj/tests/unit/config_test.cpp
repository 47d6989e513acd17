#include "swarmsim/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "swarmsim/error.hpp"

using namespace swarmsim;
using nlohmann::json;

namespace {

const std::filesystem::path kSource = SWARMSIM_SOURCE_DIR;

json minimal() {
  return json::parse(R"({
    "dt": 0.001,
    "vehicles": [{"id": 0, "position": [0, 0, 2]}]
  })");
}

ErrorKind kind_of(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << j.dump();
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Config, ShippedConfigsLoad) {
  const SimConfig hover = load_config(kSource / "configs/hover.json");
  ASSERT_EQ(hover.vehicles.size(), 1u);
  EXPECT_EQ(hover.vehicles[0].position, Vec3(0, 0, 2));
  EXPECT_TRUE(hover.log.dir.has_value());
  const SimConfig f9 = load_config(kSource / "configs/formation9.json");
  EXPECT_EQ(f9.vehicles.size(), 9u);
  EXPECT_TRUE(f9.formation.enabled);
  EXPECT_EQ(f9.formation.shapes, (std::vector<std::string>{"cube", "pyramid", "triangle"}));
  EXPECT_EQ(f9.vehicles[0].role, Role::Leader);
  // Unpositioned followers are placed on the first shape.
  EXPECT_EQ(f9.vehicles[1].position, Vec3(0, 0, 5) + cube_shape().offsets[0]);
}

TEST(Config, Defaults) {
  const SimConfig c = parse_config(minimal());
  EXPECT_EQ(c.dt.num, 1);
  EXPECT_EQ(c.dt.den, 1000);
  EXPECT_EQ(c.rates.control, 250.0);
  EXPECT_EQ(c.rates.telemetry, 30.0);
  EXPECT_EQ(c.gravity, 9.81);
  EXPECT_FALSE(c.realtime_factor.has_value());
  EXPECT_FALSE(c.formation.enabled);
}

TEST(Config, RoundTripIsLossless) {
  for (const char* name : {"configs/hover.json", "configs/formation9.json"}) {
    const SimConfig a = load_config(kSource / name);
    const json ja = config_to_json(a);
    const SimConfig b = parse_config(ja);
    EXPECT_EQ(config_to_json(b), ja) << name;
  }
}

TEST(Config, VehicleDefaultsMerge) {
  json j = minimal();
  j["vehicle_defaults"] = {{"mass", 2.0}, {"arm", 0.3}};
  j["vehicles"].push_back({{"id", 1}, {"mass", 1.2}, {"position", {3, 0, 2}}});
  const SimConfig c = parse_config(j);
  EXPECT_EQ(c.vehicles[0].mass, 2.0);
  EXPECT_EQ(c.vehicles[0].arm, 0.3);
  EXPECT_EQ(c.vehicles[1].mass, 1.2);
}

TEST(Config, RealtimeFactor) {
  json j = minimal();
  j["realtime_factor"] = 2.5;
  EXPECT_EQ(*parse_config(j).realtime_factor, 2.5);
  j["realtime_factor"] = "unbounded";
  EXPECT_FALSE(parse_config(j).realtime_factor.has_value());
}

TEST(Config, TelemetryRateNeedNotDivide) {
  json j = minimal();
  j["rates"] = {{"telemetry", 30}};
  EXPECT_NO_THROW(parse_config(j));
}

TEST(Config, Errors) {
  json j = minimal();
  j["rates"] = {{"control", 300}};
  EXPECT_EQ(kind_of(j), ErrorKind::ConfigError);

  j = minimal();
  j["vehicles"].push_back({{"id", 0}, {"position", {1, 0, 2}}});
  EXPECT_EQ(kind_of(j), ErrorKind::ConfigError);

  j = minimal();
  j["dt"] = "fast";
  EXPECT_EQ(kind_of(j), ErrorKind::ConfigError);

  j = minimal();
  j["dt"] = -0.001;
  EXPECT_EQ(kind_of(j), ErrorKind::ConfigError);

  j = json::parse(R"({"vehicles": [
      {"id": 0, "role": "leader", "position": [0,0,5]},
      {"id": 1, "role": "leader", "position": [2,0,5]}],
    "formation": {"enabled": true, "shapes": ["cube"]}})");
  EXPECT_EQ(kind_of(j), ErrorKind::ConfigError);

  j = json::parse(R"({"vehicles": [
      {"id": 0, "role": "leader", "position": [0,0,5]},
      {"id": 1, "role": "follower"}],
    "formation": {"enabled": true, "shapes": ["cube"]}})");
  EXPECT_EQ(kind_of(j), ErrorKind::ConfigError);  // 8 slots, 1 follower

  j = json::parse(R"({"vehicles": [{"id": 0, "role": "leader", "position": [0,0,5]}],
    "formation": {"enabled": true, "shapes": ["hexagon"]}})");
  EXPECT_EQ(kind_of(j), ErrorKind::ConfigError);

  j = minimal();
  j["vehicles"][0]["inertia"] = {0.02, 0.0, 0.05};
  EXPECT_NE(kind_of(j), ErrorKind::InvalidArgument);

  EXPECT_THROW(load_config(kSource / "configs/does_not_exist.json"), Error);
}

TEST(Config, GeneratedLandmarks) {
  json j = minimal();
  j["world"] = {{"landmarks", {{"generate", {{"n", 25}, {"min", {-1, -1, 0}}, {"max", {1, 1, 1}},
                                             {"seed", 3}}}}}};
  const SimConfig c = parse_config(j);
  ASSERT_TRUE(c.world.generator.has_value());
  EXPECT_EQ(c.world.generator->n, 25u);
}

TEST(Config, HelperScenarios) {
  const SimConfig f = make_formation_config({"cube", "triangle"}, 20.0);
  EXPECT_EQ(f.vehicles.size(), 9u);
  EXPECT_NO_THROW(validate(f));
  EXPECT_NO_THROW(validate(make_hover_config(3.0)));
}
