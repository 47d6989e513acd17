#include "swarmsim/protocol.hpp"

#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include "swarmsim/config.hpp"
#include "swarmsim/error.hpp"
#include "swarmsim/runner.hpp"
#include "swarmsim/service.hpp"
#include "swarmsim/simulator.hpp"

using namespace swarmsim;
using nlohmann::json;

namespace {

ErrorKind kind_of(const std::string& text, const Roster* roster = nullptr) {
  try {
    parse_command_text(text, roster);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted " << text;
  return ErrorKind::IoError;
}

// Server, runner and queue wired the same way as `swarmsim run --serve`.
class Session {
 public:
  explicit Session(SimConfig cfg, std::optional<std::filesystem::path> ui = std::nullopt)
      : sim_(std::move(cfg)) {
    TelemetryServer::Options so;
    so.ui_dir = std::move(ui);
    server_ = std::make_unique<TelemetryServer>(
        so, make_roster(sim_), [this](CommandPayload c) { queue_.push(std::move(c)); });
    server_->start();
    RunOptions opt;
    opt.start_paused = true;
    opt.stop = &stop_;
    opt.on_telemetry = [this](const StateSnapshot& s) { server_->broadcast(s); };
    thread_ = std::thread([this, opt] { Runner(sim_, queue_, opt).run(); });
  }
  ~Session() {
    stop_ = true;
    thread_.join();
    server_->stop();
  }
  int port() const { return server_->port(); }
  const TelemetryServer& server() const { return *server_; }

 private:
  Simulator sim_;
  CommandQueue queue_;
  std::atomic<bool> stop_{false};
  std::unique_ptr<TelemetryServer> server_;
  std::thread thread_;
};

// Reads frames until `pred` holds, checking every frame against the schema.
json await(ProtocolClient& c, const std::function<bool(const json&)>& pred, double timeout = 10.0) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout);
  while (std::chrono::steady_clock::now() < deadline) {
    const auto text = c.receive(0.5);
    if (!text) continue;
    const json f = json::parse(*text);
    const auto problem = validate_frame(f);
    EXPECT_FALSE(problem.has_value()) << *problem << ": " << *text;
    if (pred(f)) return f;
  }
  ADD_FAILURE() << "timed out waiting for frame";
  return {};
}

bool is_state(const json& f) { return f["type"] == "state"; }

void wait_for_clients(const Session& s, std::size_t n) {
  for (int i = 0; i < 500 && s.server().client_count() < n; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ASSERT_EQ(s.server().client_count(), n);
}

SimConfig formation_session_config() {
  return make_formation_config({"cube", "pyramid", "triangle"}, 0.0);
}

}  // namespace

TEST(Protocol, CommandsRoundTrip) {
  const std::vector<CommandPayload> cmds = {
      VelocitySetpointCmd{2, Vec3(0.5, -1.0, 0.25), 0.3, VelocityFrame::Body},
      SetShapeCmd{"pyramid"},
      PauseCmd{},
      ResumeCmd{},
      StepCmd{17},
      SetRtfCmd{2.0},
      SetRtfCmd{std::nullopt},
      TakeOffCmd{1, 3.5},
      LandCmd{4},
  };
  for (const CommandPayload& c : cmds) {
    const json j = command_to_json(c);
    const CommandPayload back = parse_command(j);
    EXPECT_EQ(back.index(), c.index());
    EXPECT_EQ(command_to_json(back), j);
  }
}

TEST(Protocol, ParsesDocumentedFrames) {
  const auto v = std::get<VelocitySetpointCmd>(
      parse_command_text(R"({"type":"velocity","id":3,"v":[1,2,3],"yaw_rate":0.5})"));
  EXPECT_EQ(v.id, 3);
  EXPECT_EQ(v.v, Vec3(1, 2, 3));
  EXPECT_EQ(v.frame, VelocityFrame::World);
  EXPECT_EQ(std::get<StepCmd>(parse_command_text(R"({"type":"step","n":5,"proto":1})")).n, 5);
  EXPECT_FALSE(
      std::get<SetRtfCmd>(parse_command_text(R"({"type":"set_rtf","factor":"unbounded"})")).factor);
}

TEST(Protocol, RejectsMalformedFrames) {
  for (const char* text : {
           "not json",
           "[1,2]",
           R"({"type":"warp"})",
           R"({"type":"pause","proto":2})",
           R"({"type":"velocity","id":0,"v":[1,2]})",
           R"({"type":"velocity","id":0,"v":[1,2,"x"]})",
           R"({"type":"velocity","v":[1,2,3]})",
           R"({"type":"step","n":0})",
           R"({"type":"step","n":1.5})",
           R"({"type":"set_rtf","factor":-1})",
           R"({"type":"set_shape"})",
       }) {
    EXPECT_EQ(kind_of(text), ErrorKind::ParseError) << text;
  }
}

TEST(Protocol, RosterRejectsUnknownTargets) {
  const Roster roster{{0, 1, 2}, {"cube"}};
  EXPECT_EQ(kind_of(R"({"type":"velocity","id":7,"v":[0,0,0]})", &roster),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of(R"({"type":"land","id":-1})", &roster), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of(R"({"type":"set_shape","name":"triangle"})", &roster),
            ErrorKind::InvalidArgument);
  EXPECT_NO_THROW(parse_command_text(R"({"type":"land","id":2})", &roster));
}

TEST(Protocol, StateFrameMatchesSchema) {
  Simulator sim(formation_session_config());
  sim.run(10);
  const json f = state_frame(sim.snapshot());
  EXPECT_FALSE(validate_frame(f).has_value());
  EXPECT_EQ(f["uavs"].size(), 9u);
  EXPECT_EQ(f["uavs"][0]["role"], "leader");
  EXPECT_EQ(f["step"], 10);
  EXPECT_FALSE(validate_frame(error_frame("boom")).has_value());

  json bad = f;
  bad["uavs"][0]["q"] = {2.0, 0.0, 0.0, 0.0};
  EXPECT_TRUE(validate_frame(bad).has_value());
  bad = f;
  bad["extra"] = 1;
  EXPECT_TRUE(validate_frame(bad).has_value());
  bad = f;
  bad.erase("paused");
  EXPECT_TRUE(validate_frame(bad).has_value());
  bad = f;
  bad["proto"] = 2;
  EXPECT_TRUE(validate_frame(bad).has_value());
}

TEST(ProtocolSession, ScriptedClientDrivesSimulation) {
  Session s(formation_session_config());
  ProtocolClient a("127.0.0.1", s.port());
  ProtocolClient b("127.0.0.1", s.port());
  wait_for_clients(s, 2);

  // Paused: idle telemetry at step 0.
  json f = await(a, is_state);
  EXPECT_EQ(f["step"], 0);
  EXPECT_EQ(f["paused"], true);

  a.send(R"({"type":"step","n":5})");
  f = await(a, [](const json& j) { return is_state(j) && j["step"] == 5; });
  EXPECT_EQ(f["paused"], true);
  // The other client sees the same world.
  await(b, [](const json& j) { return is_state(j) && j["step"] == 5; });

  // Unknown id: error frame to the sender only, no state change.
  const json before = await(a, is_state);
  a.send(R"({"type":"velocity","id":99,"v":[1,0,0]})");
  const json err = await(a, [](const json& j) { return j["type"] == "error"; });
  EXPECT_NE(err["msg"].get<std::string>().find("99"), std::string::npos);
  a.send("{oops");
  await(a, [](const json& j) { return j["type"] == "error"; });
  const json after = await(a, is_state);
  EXPECT_EQ(after["step"], before["step"]);
  EXPECT_EQ(after["uavs"], before["uavs"]);

  a.send(R"({"type":"velocity","id":0,"v":[1,0,0],"yaw_rate":0})");
  a.send(R"({"type":"set_shape","name":"pyramid"})");
  a.send(R"({"type":"step","n":1500})");
  f = await(a, [](const json& j) { return is_state(j) && j["step"] == 1505; });
  EXPECT_EQ(f["shape"], "pyramid");
  EXPECT_GT(f["uavs"][0]["v"][0].get<double>(), 0.5);

  a.send(R"({"type":"resume"})");
  f = await(a, [](const json& j) { return is_state(j) && j["step"] > 2000; });
  EXPECT_EQ(f["paused"], false);
  a.send(R"({"type":"pause"})");
  f = await(a, [](const json& j) { return is_state(j) && j["paused"] == true; });
  const json settled = await(a, is_state);
  const json later = await(a, is_state);
  EXPECT_EQ(settled["step"], later["step"]);
}

TEST(ProtocolSession, ServesStaticUi) {
  namespace http = boost::beast::http;
  const auto ui = std::filesystem::temp_directory_path() / "swarmsim_ui_test";
  std::filesystem::create_directories(ui);
  std::ofstream(ui / "index.html") << "<html>teleop</html>";
  Session s(make_hover_config(2.0), ui);

  const auto get = [&](const std::string& target) {
    boost::asio::io_context io;
    boost::asio::ip::tcp::resolver resolver(io);
    boost::beast::tcp_stream stream(io);
    stream.connect(resolver.resolve("127.0.0.1", std::to_string(s.port())));
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(stream, req);
    boost::beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    return res;
  };
  const auto index = get("/");
  EXPECT_EQ(index.result(), http::status::ok);
  EXPECT_EQ(index.body(), "<html>teleop</html>");
  EXPECT_EQ(index[http::field::content_type], "text/html");
  EXPECT_EQ(get("/missing.js").result(), http::status::not_found);
  EXPECT_EQ(get("/../etc/passwd").result(), http::status::not_found);
  std::filesystem::remove_all(ui);
}

TEST(ProtocolSession, PortInUseIsBindError) {
  TelemetryServer first({}, Roster{}, [](CommandPayload) {});
  first.start();
  TelemetryServer::Options o;
  o.port = first.port();
  TelemetryServer second(o, Roster{}, [](CommandPayload) {});
  try {
    second.start();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BindError);
  }
}
