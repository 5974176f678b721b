// wpnav: build reference maps, run single missions, run two-phase experiments.
//
// Exit codes:
//   0  success
//   1  unexpected runtime failure
//   2  parse or configuration error (including missing input files)
//   3  reference-map accumulation failed
//   4  mission aborted before reaching waypoint 1
//   5  phase 2 requested without an error set

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wpnav/config.hpp"
#include "wpnav/experiment.hpp"
#include "wpnav/metrics.hpp"
#include "wpnav/mission.hpp"
#include "wpnav/refmap.hpp"
#include "wpnav/textio.hpp"
#include "wpnav/worldsim.hpp"

namespace fs = std::filesystem;
using namespace wpnav;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kAccumulate = 3, kAbort = 4, kNoErrorSet = 5 };

void require_file(const std::string& what, const fs::path& p) {
  if (p.empty()) throw ParseError(0, what + " path not given");
  if (!fs::exists(p)) throw ParseError(0, what + " '" + p.string() + "' does not exist");
}

struct BuildMapArgs {
  std::string world;
  std::string tape;
  std::string out = "refmap.txt";
  std::uint64_t seed = 7;
  double cell = 0.1;
  bool zero_noise = false;
};

int cmd_build_map(const BuildMapArgs& a) {
  std::cout << "build-map\n  world " << a.world << "\n  tape " << a.tape << "\n  out " << a.out << "\n  seed "
            << a.seed << "\n  cell " << format_g9(a.cell) << "\n  noise " << (a.zero_noise ? "zero" : "default")
            << "\n";
  sim::World world;
  refmap::DriveTape tape;
  try {
    require_file("world", a.world);
    require_file("tape", a.tape);
    world = sim::load_world(a.world);
    tape = refmap::load_tape(a.tape);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  const sim::MotionNoise noise = a.zero_noise ? sim::MotionNoise::zero() : sim::MotionNoise{};
  refmap::AccumulateStats stats;
  try {
    const auto log = refmap::record_drive(world, tape, sim::LidarConfig{}, noise, a.seed);
    const auto map = refmap::accumulate(log, icp::IcpConfig{}, a.cell, 0.1, &stats);
    refmap::save_refmap(map, a.out);
    if (stats.icp_fallbacks > 0) {
      std::cerr << "warning: " << stats.icp_fallbacks << " of " << stats.frames
                << " frames fell back to odometry (ICP did not converge)\n";
    }
    std::cout << "frames " << stats.frames << "\npoints " << map.points.size() << "\nwrote " << a.out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: map accumulation failed: " << e.what() << '\n';
    return kAccumulate;
  }
  return kOk;
}

struct NavigateArgs {
  std::string world;
  std::string refmap;
  std::string waypoints;
  std::string localizer = "icp";
  std::string out;
  std::uint64_t seed = 1000;
  std::vector<double> offset = {0.0, 0.0, 0.0};
  bool zero_noise = false;
};

int cmd_navigate(const NavigateArgs& a) {
  std::cout << "navigate\n  world " << a.world << "\n  refmap " << (a.refmap.empty() ? "-" : a.refmap)
            << "\n  waypoints " << a.waypoints << "\n  localizer " << a.localizer << "\n  seed " << a.seed
            << "\n  offset " << format_g9(a.offset[0]) << ' ' << format_g9(a.offset[1]) << ' '
            << format_g9(a.offset[2]) << "\n  noise " << (a.zero_noise ? "zero" : "default") << "\n  out "
            << (a.out.empty() ? "-" : a.out) << '\n';
  sim::World world;
  mission::WaypointList wps;
  std::shared_ptr<const refmap::ReferenceMap> map;
  mission::LocalizerKind kind;
  try {
    const auto k = mission::parse_kind(a.localizer);
    if (!k) throw ParseError(0, "unknown localizer '" + a.localizer + "'");
    kind = *k;
    require_file("world", a.world);
    require_file("waypoints", a.waypoints);
    world = sim::load_world(a.world);
    wps = mission::load_waypoints(a.waypoints);
    if (kind == mission::LocalizerKind::PriorMap) {
      require_file("refmap", a.refmap);
      map = std::make_shared<refmap::ReferenceMap>(refmap::load_refmap(a.refmap));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  mission::MissionConfig mc;
  if (a.zero_noise) mc.noise = sim::MotionNoise::zero();
  const Pose2D offset = Pose2D::make(a.offset[0], a.offset[1], a.offset[2]);
  const auto rec = mission::run_mission(world, compose(world.start, offset), world.start, kind, map, wps, mc, a.seed);

  std::vector<bench::RecordRow> rows = bench::to_rows(rec, 0, wps);
  for (const auto& r : rows) {
    std::cout << "wp " << r.wp << ' ' << mission::to_string(r.status) << " t=" << format_f6(r.sim_time);
    if (r.truth) {
      const PoseError e = pose_error(*r.truth, r.goal);
      std::cout << " err_trans=" << format_f6(e.trans) << " err_rot=" << format_f6(e.rot);
    }
    std::cout << '\n';
  }
  int reached = 0;
  for (const auto& r : rows) reached += r.status == mission::Status::Reached;
  std::cout << "reached " << reached << " of " << wps.size() << '\n';
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) {
      std::cerr << "error: cannot write " << a.out << '\n';
      return kRuntime;
    }
    bench::write_records_csv(f, rows);
  }
  return rec.reached(1) ? kOk : kAbort;
}

struct ExperimentArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> m;
  std::string phase;
  std::string localizer;
  std::string out;
};

int cmd_experiment(const ExperimentArgs& a) {
  bench::ExperimentConfig cfg;
  try {
    cfg = load_experiment_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    if (a.workers) cfg.workers = *a.workers;
    if (a.m) cfg.m = *a.m;
    if (!a.out.empty()) cfg.out = a.out;
    if (cfg.out.empty()) cfg.out = "results";
    if (a.phase == "1") {
      cfg.phases = {1};
    } else if (a.phase == "2") {
      cfg.phases = {2};
    } else if (a.phase == "both") {
      cfg.phases = {1, 2};
    } else if (!a.phase.empty()) {
      throw ParseError(0, "--phase must be 1, 2 or both");
    }
    if (!a.localizer.empty()) {
      const auto k = mission::parse_kind(a.localizer);
      if (!k) throw ParseError(0, "unknown localizer '" + a.localizer + "'");
      cfg.kinds = {*k};
    }
    cfg.validate();
    require_file("world", cfg.world);
    require_file("waypoints", cfg.waypoints);
    if (cfg.refmap.empty()) {
      for (auto k : cfg.kinds) {
        if (k == mission::LocalizerKind::PriorMap) require_file("tape", cfg.tape);
      }
    } else {
      require_file("refmap", cfg.refmap);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  std::cout << "# resolved configuration\n";
  write_experiment_config(std::cout, cfg);
  std::cout << '\n';

  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto result = bench::run_experiment(cfg, &std::cout);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << '\n';
    bench::print_summary(std::cout, result);
    std::cout << "\nwrote " << cfg.out.string() << " in " << format_f6(secs) << " s\n";
  } catch (const bench::MissingErrorSet& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoErrorSet;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}

struct ReportArgs {
  std::string records;
  std::string out;
  int waypoints = 0;
};

int cmd_report(const ReportArgs& a) {
  std::cout << "report\n  records " << a.records << "\n  out " << a.out << "\n  waypoints "
            << (a.waypoints > 0 ? std::to_string(a.waypoints) : "auto") << '\n';
  bench::ExperimentResult result;
  try {
    require_file("records", a.records);
    std::ifstream in(a.records);
    result.rows = bench::read_records_csv(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  result.n_waypoints = a.waypoints;
  if (result.n_waypoints <= 0) {
    for (const auto& r : result.rows) result.n_waypoints = std::max(result.n_waypoints, r.wp);
  }
  result.groups = bench::summarize(result.rows, result.n_waypoints);
  bench::write_report(result, a.out);
  bench::print_summary(std::cout, result);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Waypoint navigation with a prior reference map versus online grid SLAM"};
  app.require_subcommand(1);

  BuildMapArgs bm;
  auto* build = app.add_subcommand("build-map", "Replay a drive tape and accumulate a reference map");
  build->add_option("--world", bm.world, "World file")->required();
  build->add_option("--tape", bm.tape, "Drive tape")->required();
  build->add_option("--out", bm.out, "Output map file");
  build->add_option("--seed", bm.seed, "Noise seed for the drive");
  build->add_option("--cell", bm.cell, "Voxel filter cell (m)");
  build->add_flag("--zero-noise", bm.zero_noise, "Disable odometry and range noise");

  NavigateArgs nv;
  auto* nav = app.add_subcommand("navigate", "Run one mission");
  nav->add_option("--world", nv.world, "World file")->required();
  nav->add_option("--refmap", nv.refmap, "Reference map (icp localizer)");
  nav->add_option("--waypoints", nv.waypoints, "Waypoint file")->required();
  nav->add_option("--localizer", nv.localizer, "icp or gridslam")->check(CLI::IsMember({"icp", "gridslam"}));
  nav->add_option("--seed", nv.seed, "Mission seed");
  nav->add_option("--offset", nv.offset, "True start offset x y yaw")->expected(3);
  nav->add_option("--out", nv.out, "Record file (csv)");
  nav->add_flag("--zero-noise", nv.zero_noise, "Disable odometry and range noise");

  ExperimentArgs ex;
  auto* exp = app.add_subcommand("experiment", "Run the two-phase experiment from a config file");
  exp->add_option("config", ex.config, "Experiment config")->required();
  exp->add_option("--seed", ex.seed, "Base seed");
  exp->add_option("--workers", ex.workers, "Parallel trials")->check(CLI::PositiveNumber);
  exp->add_option("--m", ex.m, "Trials per phase and localizer")->check(CLI::PositiveNumber);
  exp->add_option("--phase", ex.phase, "1, 2 or both");
  exp->add_option("--localizer", ex.localizer, "Restrict to icp or gridslam");
  exp->add_option("--out", ex.out, "Result directory");

  ReportArgs rp;
  auto* rep = app.add_subcommand("report", "Re-render tables and plots from a record file");
  rep->add_option("--records", rp.records, "records.csv")->required();
  rep->add_option("--out", rp.out, "Output directory")->required();
  rep->add_option("--waypoints", rp.waypoints, "Number of waypoints (default: highest index seen)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*build) return cmd_build_map(bm);
    if (*nav) return cmd_navigate(nv);
    if (*exp) return cmd_experiment(ex);
    if (*rep) return cmd_report(rp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
