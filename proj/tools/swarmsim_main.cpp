// swarmsim command-line front end: run, eval, formation, worldgen.

#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "swarmsim/config.hpp"
#include "swarmsim/error.hpp"
#include "swarmsim/log_bundle.hpp"
#include "swarmsim/protocol.hpp"
#include "swarmsim/runner.hpp"
#include "swarmsim/service.hpp"
#include "swarmsim/simulator.hpp"
#include "swarmsim/traj_eval.hpp"

using namespace swarmsim;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

json report_json(const MetricReport& r) {
  return {{"rmse", r.rmse},     {"mean", r.mean}, {"median", r.median}, {"std", r.std},
          {"min", r.min},       {"max", r.max},   {"unit", to_string(r.unit)},
          {"n_pairs", r.n_pairs}};
}

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + path);
  }
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> steps;
  std::optional<int> serve;
  std::optional<std::uint64_t> seed;
  std::string serve_ui;
  std::string log_dir;
  std::string replay;
  std::string rtf;
  bool paused = false;
};

int cmd_run(const RunArgs& a) {
  SimConfig cfg = load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (!a.log_dir.empty()) cfg.log.dir = a.log_dir;
  if (a.serve) cfg.serve_port = *a.serve;
  if (!a.rtf.empty()) {
    if (a.rtf == "unbounded") {
      cfg.realtime_factor.reset();
    } else {
      cfg.realtime_factor = std::stod(a.rtf);
    }
  }
  std::optional<Transcript> transcript;
  if (!a.replay.empty()) {
    transcript = Transcript::load(a.replay);
    if (!a.seed) cfg.seed = transcript->seed;
  }

  std::unique_ptr<LogBundle> log;
  if (cfg.log.dir) {
    log = std::make_unique<LogBundle>(*cfg.log.dir, cfg);
  }
  Simulator sim(cfg, log.get());
  CommandQueue queue;

  RunOptions opt;
  opt.stop = &g_stop;
  opt.start_paused = a.paused;
  opt.replay = transcript ? &*transcript : nullptr;
  if (a.steps) {
    opt.max_steps = a.steps;
  } else if (!cfg.serve_port && !transcript) {
    opt.max_steps = static_cast<std::uint64_t>(std::llround(cfg.duration / cfg.dt.value()));
  }

  std::unique_ptr<TelemetryServer> server;
  if (cfg.serve_port) {
    TelemetryServer::Options so;
    so.port = *cfg.serve_port;
    if (!a.serve_ui.empty()) so.ui_dir = a.serve_ui;
    server = std::make_unique<TelemetryServer>(so, make_roster(sim),
                                               [&queue](CommandPayload c) { queue.push(std::move(c)); });
    server->start();
    opt.on_telemetry = [&server](const StateSnapshot& s) { server->broadcast(s); };
    std::cout << "listening on port " << server->port() << std::endl;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  Runner runner(sim, queue, opt);
  const RunReport rep = runner.run();
  if (server) server->stop();
  if (log) log->close(sim.step_index());

  std::cerr << "steps " << rep.steps << "  sim_time " << rep.sim_time << " s  wall "
            << rep.wall_seconds << " s  commands " << rep.commands_applied << " applied, "
            << rep.commands_rejected << " rejected\n";
  return 0;
}

struct EvalArgs {
  std::string mode = "ape";
  std::string ref, est, out;
  double delta = 0.5;
  std::string align = "none";
  double max_dt = 0.01;
};

int cmd_eval(const EvalArgs& a) {
  const Trajectory ref = read_tum(a.ref);
  const Trajectory est = read_tum(a.est);
  const auto pairs = associate(ref, est, a.max_dt);
  json out = {{"mode", a.mode}, {"ref", a.ref}, {"est", a.est}, {"max_dt", a.max_dt}};
  ErrorReports r;
  if (a.mode == "ape") {
    r = ape(pairs, a.align == "se3" ? Alignment::SE3 : Alignment::None);
    out["align"] = a.align;
  } else {
    r = rpe(pairs, a.delta);
    out["delta"] = a.delta;
  }
  out["trans"] = report_json(r.trans);
  out["rot"] = report_json(r.rot);
  write_json(a.out, out);
  return 0;
}

struct FormationArgs {
  std::string shape_seq = "cube,pyramid,triangle";
  std::string sim = "fast";
  double phase = 0.0;
  double tolerance = 0.1;
  std::size_t followers = 8;
  std::string assignment = "identity";
  std::size_t delay = 0;
  std::string log_dir, out;
  std::uint64_t seed = 1;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int cmd_formation(const FormationArgs& a) {
  const std::vector<std::string> names = split_list(a.shape_seq);
  const AssignmentPolicy policy =
      a.assignment == "min_distance" ? AssignmentPolicy::MinTotalDistance : AssignmentPolicy::Identity;
  std::vector<PhaseReport> phases;
  json out = {{"sim", a.sim}, {"shapes", names}, {"tolerance", a.tolerance}};
  if (a.sim == "fast") {
    FastSimConfig fc;
    fc.phase_duration = a.phase > 0.0 ? a.phase : 15.0;
    fc.error_tolerance = a.tolerance;
    fc.policy = policy;
    fc.link_delay_ticks = a.delay;
    for (const std::string& n : names) {
      fc.shape_sequence.push_back(builtin_shape(n));
    }
    FastFormationSim sim(fc);
    const auto t0 = std::chrono::steady_clock::now();
    const FastSimReport rep = sim.run();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    phases = rep.phases;
    out["steps"] = rep.steps;
    out["wall_seconds"] = wall;
    out["phase_duration"] = fc.phase_duration;
  } else {
    SimConfig cfg = make_formation_config(names, a.phase > 0.0 ? a.phase : 25.0, a.followers);
    cfg.seed = a.seed;
    cfg.formation.assignment = policy;
    cfg.formation.link_delay_ticks = a.delay;
    std::unique_ptr<LogBundle> log;
    if (!a.log_dir.empty()) {
      cfg.log.dir = a.log_dir;
      log = std::make_unique<LogBundle>(a.log_dir, cfg);
    }
    const auto t0 = std::chrono::steady_clock::now();
    phases = run_formation_scenario(cfg, a.tolerance, log.get());
    out["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out["phase_duration"] = cfg.formation.phase_duration;
  }
  json pj = json::array();
  for (const PhaseReport& p : phases) {
    pj.push_back({{"shape", p.shape},
                  {"start_time", p.start_time},
                  {"settle_time", p.settle_time},
                  {"error_at_10s", p.error_at_10s},
                  {"final_error", p.final_error}});
  }
  out["phases"] = pj;
  write_json(a.out, out);
  return 0;
}

struct WorldgenArgs {
  std::size_t n = 100;
  std::vector<double> box{-20, -20, 0, 20, 20, 10};
  std::uint64_t seed = 1;
  std::string out = "landmarks.csv";
};

int cmd_worldgen(const WorldgenArgs& a) {
  if (a.box.size() != 6) {
    throw Error(ErrorKind::InvalidArgument, "--box needs xmin ymin zmin xmax ymax zmax");
  }
  const Vec3 lo(a.box[0], a.box[1], a.box[2]);
  const Vec3 hi(a.box[3], a.box[4], a.box[5]);
  write_landmarks(a.out, generate_landmarks(a.n, lo, hi, a.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic multirotor swarm simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a simulation from a JSON config");
  run->add_option("--config", run_args.config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--steps", run_args.steps, "Number of physics ticks to run");
  run->add_option("--serve", run_args.serve, "Serve the WebSocket protocol on this port (0: any)");
  run->add_option("--seed", run_args.seed, "Override the config seed");
  run->add_option("--serve-ui", run_args.serve_ui, "Static UI directory served over HTTP")
      ->check(CLI::ExistingDirectory);
  run->add_option("--log-dir", run_args.log_dir, "Override the log directory");
  run->add_option("--replay", run_args.replay, "Replay a recorded command transcript")
      ->check(CLI::ExistingFile);
  run->add_option("--rtf", run_args.rtf, "Realtime factor, a number or 'unbounded'");
  run->add_flag("--paused", run_args.paused, "Start paused (serve mode)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "APE/RPE between two TUM trajectories");
  eval->add_option("--mode", eval_args.mode)->check(CLI::IsMember({"ape", "rpe"}));
  eval->add_option("--ref", eval_args.ref)->required()->check(CLI::ExistingFile);
  eval->add_option("--est", eval_args.est)->required()->check(CLI::ExistingFile);
  eval->add_option("--delta", eval_args.delta, "RPE path distance (m)");
  eval->add_option("--align", eval_args.align)->check(CLI::IsMember({"none", "se3"}));
  eval->add_option("--max-dt", eval_args.max_dt, "Association tolerance (s)");
  eval->add_option("--out", eval_args.out, "Report file (default stdout)");

  FormationArgs form_args;
  auto* form = app.add_subcommand("formation", "Leader-follower shape reconfiguration");
  form->add_option("--shape-seq", form_args.shape_seq, "Comma-separated shape names");
  form->add_option("--sim", form_args.sim)->check(CLI::IsMember({"fast", "full"}));
  form->add_option("--phase", form_args.phase, "Seconds per shape (fast 15, full 25)");
  form->add_option("--tolerance", form_args.tolerance, "Settled error threshold (m)");
  form->add_option("--followers", form_args.followers);
  form->add_option("--assignment", form_args.assignment)
      ->check(CLI::IsMember({"identity", "min_distance"}));
  form->add_option("--link-delay", form_args.delay, "Leader link delay in formation ticks");
  form->add_option("--log-dir", form_args.log_dir, "Write a log bundle (full sim)");
  form->add_option("--seed", form_args.seed);
  form->add_option("--out", form_args.out, "Report file (default stdout)");

  WorldgenArgs wg_args;
  auto* wg = app.add_subcommand("worldgen", "Generate a landmark world file");
  wg->add_option("--landmarks", wg_args.n)->required();
  wg->add_option("--box", wg_args.box, "xmin ymin zmin xmax ymax zmax")->expected(6);
  wg->add_option("--seed", wg_args.seed);
  wg->add_option("--out", wg_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; usage errors share the error exit code.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*run) return cmd_run(run_args);
    if (*eval) return cmd_eval(eval_args);
    if (*form) return cmd_formation(form_args);
    if (*wg) return cmd_worldgen(wg_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
