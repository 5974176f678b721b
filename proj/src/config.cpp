#include "wpnav/config.hpp"

#include <fstream>
#include <ostream>

#include "wpnav/textio.hpp"

namespace wpnav {

namespace fs = std::filesystem;
using mission::LocalizerKind;

namespace {

void want_args(const TextLine& l, std::size_t n) {
  if (l.tokens.size() != n + 1) {
    throw ParseError(l.number, "'" + l.tokens[0] + "' takes " + std::to_string(n) + " value(s)");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

LocalizerKind kind_of(const TextLine& l, const std::string& s) {
  const auto k = mission::parse_kind(s);
  if (!k) throw ParseError(l.number, "unknown localizer '" + s + "' (use icp or gridslam)");
  return *k;
}

}  // namespace

bench::ExperimentConfig parse_experiment_config(std::istream& in, const fs::path& base_dir) {
  auto lines = read_lines(in);
  std::erase_if(lines, [](const TextLine& l) { return l.tokens.empty() || l.tokens[0][0] == '#'; });
  if (lines.empty()) throw ParseError(0, "empty experiment config");
  expect_header(lines[0], "EXPERIMENT", 1);

  bench::ExperimentConfig cfg;
  auto& mc = cfg.mission;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const TextLine& l = lines[k];
    const std::string& key = l.tokens[0];
    auto num = [&](std::size_t i) { return parse_double(l.tokens[i], l.number); };
    auto integer = [&](std::size_t i) { return parse_int(l.tokens[i], l.number); };
    if (key == "world") {
      want_args(l, 1);
      cfg.world = resolve(base_dir, l.tokens[1]);
    } else if (key == "waypoints") {
      want_args(l, 1);
      cfg.waypoints = resolve(base_dir, l.tokens[1]);
    } else if (key == "tape") {
      want_args(l, 1);
      cfg.tape = resolve(base_dir, l.tokens[1]);
    } else if (key == "refmap") {
      want_args(l, 1);
      cfg.refmap = resolve(base_dir, l.tokens[1]);
    } else if (key == "out") {
      want_args(l, 1);
      cfg.out = resolve(base_dir, l.tokens[1]);
    } else if (key == "errset.icp" || key == "errset.gridslam") {
      want_args(l, 1);
      cfg.errsets[kind_of(l, key.substr(7))] = resolve(base_dir, l.tokens[1]);
    } else if (key == "m") {
      want_args(l, 1);
      cfg.m = static_cast<int>(integer(1));
    } else if (key == "workers") {
      want_args(l, 1);
      cfg.workers = static_cast<int>(integer(1));
    } else if (key == "seed") {
      want_args(l, 1);
      cfg.seed = static_cast<std::uint64_t>(integer(1));
    } else if (key == "map_seed") {
      want_args(l, 1);
      cfg.map_seed = static_cast<std::uint64_t>(integer(1));
    } else if (key == "map_cell") {
      want_args(l, 1);
      cfg.map_cell = num(1);
    } else if (key == "localizers") {
      if (l.tokens.size() < 2) throw ParseError(l.number, "'localizers' needs at least one kind");
      cfg.kinds.clear();
      for (std::size_t i = 1; i < l.tokens.size(); ++i) cfg.kinds.push_back(kind_of(l, l.tokens[i]));
    } else if (key == "phases") {
      if (l.tokens.size() < 2) throw ParseError(l.number, "'phases' needs at least one phase");
      cfg.phases.clear();
      for (std::size_t i = 1; i < l.tokens.size(); ++i) cfg.phases.push_back(static_cast<int>(integer(i)));
    } else if (key == "odom_noise") {
      want_args(l, 4);
      mc.noise.a1 = num(1);
      mc.noise.a2 = num(2);
      mc.noise.a3 = num(3);
      mc.noise.a4 = num(4);
    } else if (key == "range_sigma") {
      want_args(l, 1);
      mc.noise.range_sigma = num(1);
    } else if (key == "dt") {
      want_args(l, 1);
      mc.dt = num(1);
    } else if (key == "timeout_per_wp") {
      want_args(l, 1);
      mc.timeout_per_wp = num(1);
    } else if (key == "robot_radius") {
      want_args(l, 1);
      mc.robot_radius = num(1);
      mc.costmap.robot_radius = mc.robot_radius;
    } else if (key == "inflation_radius") {
      want_args(l, 1);
      mc.costmap.inflation_radius = num(1);
    } else if (key == "goal_tolerance") {
      want_args(l, 2);
      mc.tolerance.xy_tol = num(1);
      mc.tolerance.yaw_tol = num(2);
    } else if (key == "lidar") {
      want_args(l, 2);
      mc.lidar.beams = static_cast<int>(integer(1));
      mc.lidar.max_range = num(2);
    } else {
      throw ParseError(l.number, "unknown key '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
  if (cfg.world.empty()) throw ParseError(0, "config lacks 'world'");
  if (cfg.waypoints.empty()) throw ParseError(0, "config lacks 'waypoints'");
  return cfg;
}

bench::ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open config '" + path.string() + "'");
  return parse_experiment_config(in, path.parent_path());
}

void write_experiment_config(std::ostream& out, const bench::ExperimentConfig& cfg) {
  const auto& mc = cfg.mission;
  out << "EXPERIMENT 1\n";
  out << "world " << cfg.world.string() << '\n';
  out << "waypoints " << cfg.waypoints.string() << '\n';
  if (!cfg.tape.empty()) out << "tape " << cfg.tape.string() << '\n';
  if (!cfg.refmap.empty()) out << "refmap " << cfg.refmap.string() << '\n';
  if (!cfg.out.empty()) out << "out " << cfg.out.string() << '\n';
  for (const auto& [kind, path] : cfg.errsets) out << "errset." << mission::to_string(kind) << ' ' << path.string() << '\n';
  out << "m " << cfg.m << '\n';
  out << "workers " << cfg.workers << '\n';
  out << "seed " << cfg.seed << '\n';
  out << "map_seed " << cfg.map_seed << '\n';
  out << "map_cell " << format_g9(cfg.map_cell) << '\n';
  out << "localizers";
  for (auto k : cfg.kinds) out << ' ' << mission::to_string(k);
  out << "\nphases";
  for (int p : cfg.phases) out << ' ' << p;
  out << "\nodom_noise " << format_g9(mc.noise.a1) << ' ' << format_g9(mc.noise.a2) << ' ' << format_g9(mc.noise.a3)
      << ' ' << format_g9(mc.noise.a4) << '\n';
  out << "range_sigma " << format_g9(mc.noise.range_sigma) << '\n';
  out << "dt " << format_g9(mc.dt) << '\n';
  out << "timeout_per_wp " << format_g9(mc.timeout_per_wp) << '\n';
  out << "robot_radius " << format_g9(mc.robot_radius) << '\n';
  out << "inflation_radius " << format_g9(mc.costmap.inflation_radius) << '\n';
  out << "goal_tolerance " << format_g9(mc.tolerance.xy_tol) << ' ' << format_g9(mc.tolerance.yaw_tol) << '\n';
  out << "lidar " << mc.lidar.beams << ' ' << format_g9(mc.lidar.max_range) << '\n';
}

}  // namespace wpnav
