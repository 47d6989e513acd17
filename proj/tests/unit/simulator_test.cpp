#include "swarmsim/simulator.hpp"

#include <gtest/gtest.h>

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "swarmsim/config.hpp"
#include "swarmsim/error.hpp"
#include "swarmsim/log_bundle.hpp"
#include "swarmsim/runner.hpp"

using namespace swarmsim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("swarmsim_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Every file in `a` exists in `b` with the same bytes, and vice versa.
void expect_identical_dirs(const fs::path& a, const fs::path& b) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_TRUE(slurp(e.path()) == slurp(other)) << e.path().filename();
    ++n;
  }
  EXPECT_EQ(n, static_cast<std::size_t>(std::distance(fs::directory_iterator(b), {})));
  EXPECT_GT(n, 5u);
}

void expect_same_state(const Simulator& a, const Simulator& b) {
  ASSERT_EQ(a.step_index(), b.step_index());
  ASSERT_EQ(a.vehicles().size(), b.vehicles().size());
  for (std::size_t i = 0; i < a.vehicles().size(); ++i) {
    const VehicleRuntime& x = a.vehicles()[i];
    const VehicleRuntime& y = b.vehicles()[i];
    EXPECT_EQ(x.state.p, y.state.p);
    EXPECT_EQ(x.state.v, y.state.v);
    EXPECT_EQ(x.state.omega, y.state.omega);
    EXPECT_EQ(x.state.q.w(), y.state.q.w());
    EXPECT_EQ(x.state.q.vec(), y.state.q.vec());
    EXPECT_EQ(x.omega, y.omega);
  }
}

SimConfig small_formation() {
  SimConfig c = make_formation_config({"cube", "pyramid"}, 1.0);
  for (auto& v : c.vehicles) {
    v.camera.enabled = true;
  }
  c.world.generator = LandmarkGenerator{100, Vec3(-10, -10, 0), Vec3(10, 10, 8), 4};
  return c;
}

}  // namespace

TEST(Simulator, SameSeedGivesByteIdenticalLogs) {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  for (const fs::path& d : {a, b}) {
    const SimConfig cfg = small_formation();
    LogBundle log(d, cfg);
    Simulator sim(cfg, &log);
    sim.run(1500);
    sim.apply(SetShapeCmd{"cube"});
    sim.apply(VelocitySetpointCmd{0, Vec3(0.5, 0, 0), 0.1, VelocityFrame::Body});
    sim.run(1000);
    log.close(sim.step_index());
  }
  expect_identical_dirs(a, b);
  EXPECT_GT(count_lines(a / "uav3_camera.csv"), 10u);
  EXPECT_GT(count_lines(a / "uav3_accel.csv"), 100u);
}

TEST(Simulator, DifferentSeedChangesSensorsOnly) {
  SimConfig c1 = make_hover_config(2.0), c2 = make_hover_config(2.0);
  c2.seed = c1.seed + 1;
  Simulator s1(c1), s2(c2);
  s1.run(3000);
  s2.run(3000);
  // Control runs on truth, so the flown trajectories agree.
  expect_same_state(s1, s2);
}

TEST(Simulator, SingleStepsThroughRunnerEqualRun) {
  const SimConfig cfg = small_formation();
  const std::uint64_t n = 400;
  Simulator reference(cfg);
  reference.run(n);

  Simulator sim(cfg);
  CommandQueue queue;
  std::mutex mu;
  std::condition_variable cv;
  std::uint64_t seen = 0;
  std::atomic<bool> stop{false};
  RunOptions opt;
  opt.start_paused = true;
  opt.stop = &stop;
  opt.on_telemetry = [&](const StateSnapshot& s) {
    std::lock_guard lock(mu);
    seen = s.step;
    cv.notify_all();
  };
  std::thread runner([&] { Runner(sim, queue, opt).run(); });
  for (std::uint64_t k = 1; k <= n; ++k) {
    queue.push(StepCmd{1});
    std::unique_lock lock(mu);
    ASSERT_TRUE(cv.wait_for(lock, std::chrono::seconds(5), [&] { return seen == k; }));
  }
  stop = true;
  runner.join();
  expect_same_state(reference, sim);
}

TEST(Simulator, PausedRunnerDoesNotAdvance) {
  Simulator sim(make_hover_config(2.0));
  CommandQueue queue;
  std::atomic<bool> stop{false};
  RunOptions opt;
  opt.start_paused = true;
  opt.stop = &stop;
  std::thread runner([&] { Runner(sim, queue, opt).run(); });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  stop = true;
  runner.join();
  EXPECT_EQ(sim.step_index(), 0u);
}

TEST(Simulator, ReplayReproducesLiveRun) {
  const fs::path live = fresh_dir("live"), replayed = fresh_dir("replayed");
  const SimConfig cfg = small_formation();
  {
    LogBundle log(live, cfg);
    Simulator sim(cfg, &log);
    CommandQueue queue;
    RunOptions opt;
    opt.max_steps = 1200;
    // Commands queued before the run land at tick 0; the rest are applied
    // directly at later ticks.
    queue.push(VelocitySetpointCmd{0, Vec3(0, 0.4, 0), 0.0, VelocityFrame::World});
    Runner(sim, queue, opt).run();
    sim.apply(SetShapeCmd{"cube"});
    sim.run(300);
    sim.apply(LandCmd{0});
    sim.run(500);
    log.close(sim.step_index());
  }
  const Transcript t = Transcript::load(live / "commands.json");
  EXPECT_EQ(t.commands.size(), 3u);
  EXPECT_EQ(t.final_tick, 2000u);
  EXPECT_EQ(t.commands[1].tick, 1200u);
  {
    LogBundle log(replayed, cfg);
    Simulator sim(cfg, &log);
    CommandQueue queue;
    RunOptions opt;
    opt.replay = &t;
    const RunReport r = Runner(sim, queue, opt).run();
    EXPECT_EQ(r.steps, 2000u);
    log.close(sim.step_index());
  }
  expect_identical_dirs(live, replayed);
}

TEST(Simulator, ZeroStepRunLeavesHeadersOnly) {
  const fs::path d = fresh_dir("zero");
  SimConfig cfg = make_hover_config(2.0);
  cfg.vehicles[0].camera.enabled = true;
  {
    LogBundle log(d, cfg);
    Simulator sim(cfg, &log);
    log.close(0);
  }
  EXPECT_EQ(fs::file_size(d / "uav0_groundtruth.tum"), 0u);
  for (const char* name : {"uav0_velocity.csv", "uav0_accel.csv", "uav0_gyro.csv", "uav0_mag.csv",
                           "uav0_baro.csv", "uav0_gps_pos.csv", "uav0_gps_vel.csv",
                           "uav0_camera.csv"}) {
    ASSERT_TRUE(fs::exists(d / name)) << name;
    EXPECT_EQ(count_lines(d / name), 1u) << name;
  }
  EXPECT_EQ(slurp(d / "uav0_velocity.csv"), "t,vx_ref,vy_ref,vz_ref,vx,vy,vz\n");
  EXPECT_EQ(slurp(d / "uav0_baro.csv"), "t,true_alt,meas_alt\n");
  EXPECT_TRUE(fs::exists(d / "config.json"));
  EXPECT_TRUE(fs::exists(d / "commands.json"));
}

TEST(Simulator, LogRatesGiveExpectedLineCounts) {
  const fs::path d = fresh_dir("rates");
  const SimConfig cfg = make_hover_config(2.0);
  {
    LogBundle log(d, cfg);
    Simulator sim(cfg, &log);
    sim.run(10000);
    log.close(sim.step_index());
  }
  EXPECT_EQ(count_lines(d / "uav0_groundtruth.tum"), 500u);
  EXPECT_EQ(count_lines(d / "uav0_velocity.csv"), 501u);
  EXPECT_EQ(count_lines(d / "uav0_accel.csv"), 2501u);
  EXPECT_EQ(count_lines(d / "uav0_gps_pos.csv"), 101u);
  EXPECT_EQ(count_lines(d / "uav0_baro.csv"), 501u);
}

TEST(Simulator, RejectsUnknownTargets) {
  Simulator sim(small_formation());
  EXPECT_THROW(sim.apply(VelocitySetpointCmd{42, Vec3::Zero(), 0.0, VelocityFrame::World}), Error);
  EXPECT_THROW(sim.apply(SetShapeCmd{"hexagon"}), Error);
  Simulator solo(make_hover_config(2.0));
  EXPECT_THROW(solo.apply(SetShapeCmd{"cube"}), Error);
}

TEST(Simulator, ShapesSwitchOnSchedule) {
  Simulator sim(small_formation());
  EXPECT_EQ(sim.current_shape(), "cube");
  // The switch belongs to tick 1000, processed by the 1001st step().
  sim.run(1000);
  EXPECT_EQ(sim.current_shape(), "cube");
  sim.step();
  EXPECT_EQ(sim.current_shape(), "pyramid");
  sim.apply(SetShapeCmd{"cube"});
  EXPECT_EQ(sim.current_shape(), "cube");
  EXPECT_EQ(sim.snapshot().uavs.size(), 9u);
}

TEST(Simulator, FormationScenarioConverges) {
  SimConfig cfg = make_formation_config({"cube", "pyramid"}, 15.0);
  const auto phases = run_formation_scenario(cfg, 0.1);
  ASSERT_EQ(phases.size(), 2u);
  EXPECT_LT(phases[1].error_at_10s, 0.1);
  EXPECT_LT(phases[1].final_error, 0.1);
}
