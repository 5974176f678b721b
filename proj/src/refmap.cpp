#include "wpnav/refmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "wpnav/textio.hpp"

namespace wpnav::refmap {

namespace {

std::uint64_t cell_key(Point2 p, double cell) {
  const auto cx = static_cast<std::int32_t>(std::floor(p.x / cell));
  const auto cy = static_cast<std::int32_t>(std::floor(p.y / cell));
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
         static_cast<std::uint32_t>(cy);
}

}  // namespace

VoxelFilter::VoxelFilter(double cell) : cell_(cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("downsample cell must be positive");
}

void VoxelFilter::insert(Point2 p) {
  const auto key = cell_key(p, cell_);
  auto [it, inserted] = lookup_.try_emplace(key, cells_.size());
  if (inserted) {
    cells_.push_back({p.x, p.y, 1, p});
    return;
  }
  Slot& s = cells_[it->second];
  s.sum_x += p.x;
  s.sum_y += p.y;
  ++s.count;
  const Point2 centroid{s.sum_x / s.count, s.sum_y / s.count};
  if (squared_distance(p, centroid) < squared_distance(s.rep, centroid)) s.rep = p;
}

PointCloud2D VoxelFilter::points() const {
  PointCloud2D out;
  out.reserve(cells_.size());
  for (const auto& s : cells_) out.push_back(s.rep);
  return out;
}

PointCloud2D downsample(const PointCloud2D& points, double cell) {
  VoxelFilter f(cell);
  for (const Point2 p : points) f.insert(p);
  return f.points();
}

OccupancyLayer rasterize(const PointCloud2D& points, double resolution) {
  if (points.empty()) throw std::invalid_argument("cannot rasterize an empty map");
  if (!(resolution > 0.0)) throw std::invalid_argument("raster resolution must be positive");
  double minx = HUGE_VAL, miny = HUGE_VAL, maxx = -HUGE_VAL, maxy = -HUGE_VAL;
  for (const Point2 p : points) {
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  }
  constexpr double pad = 1.0;
  GridGeometry g;
  g.resolution = resolution;
  g.origin = {minx - pad, miny - pad};
  g.cols = static_cast<int>(std::floor((maxx + pad - g.origin.x) / resolution)) + 1;
  g.rows = static_cast<int>(std::floor((maxy + pad - g.origin.y) / resolution)) + 1;
  OccupancyLayer grid(g, 0);
  for (const Point2 p : points) grid.at(g.cell_of(p)) = 1;
  return grid;
}

ReferenceMap make_reference_map(PointCloud2D points, double cell, double raster_resolution) {
  ReferenceMap m;
  m.cell = cell;
  m.grid = rasterize(points, raster_resolution);
  m.index = std::make_shared<const icp::NNIndex>(points);
  m.points = std::move(points);
  return m;
}

ReferenceMap accumulate(const TeleopLog& log, const icp::IcpConfig& cfg, double cell,
                        double raster_resolution, AccumulateStats* stats) {
  if (log.empty()) throw std::invalid_argument("teleop log is empty");
  icp::validate(cfg);
  VoxelFilter filter(cell);
  AccumulateStats local;
  Pose2D pose = log.front().odom;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto hits = log[k].scan.hit_points();
    if (k > 0) {
      const Pose2D guess = compose(pose, relative(log[k - 1].odom, log[k].odom));
      pose = guess;
      if (filter.size() > 0 && !hits.empty()) {
        const icp::NNIndex index(filter.points());
        const auto res = icp::run_icp(hits, index, guess, cfg);
        if (res.converged) {
          pose = res.transform;
        } else {
          ++local.icp_fallbacks;
        }
      }
    }
    local.poses.push_back(pose);
    for (const Point2 h : hits) filter.insert(transform_point(pose, h));
  }
  local.frames = log.size();
  auto points = filter.points();
  if (points.empty()) throw std::runtime_error("mapping drive produced no lidar returns");
  if (stats) *stats = std::move(local);
  return make_reference_map(std::move(points), cell, raster_resolution);
}

void write_refmap(std::ostream& out, const ReferenceMap& map) {
  out << "REFMAP 1\n";
  out << "cell " << format_g9(map.cell) << "\n";
  out << "count " << map.points.size() << "\n";
  for (const Point2 p : map.points) out << format_g9(p.x) << ' ' << format_g9(p.y) << '\n';
}

void save_refmap(const ReferenceMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write reference map '" + path + "'");
  write_refmap(out, map);
  if (!out) throw std::runtime_error("failed writing reference map '" + path + "'");
}

ReferenceMap read_refmap(std::istream& in, double raster_resolution) {
  auto lines = read_lines(in);
  std::erase_if(lines, [](const TextLine& l) { return l.tokens.empty(); });
  if (lines.empty()) throw ParseError(0, "empty reference map file");
  expect_header(lines[0], "REFMAP", 1);
  if (lines.size() < 3) throw ParseError(lines.back().number, "missing 'cell' or 'count' line");
  const auto& cl = lines[1];
  if (cl.tokens.size() != 2 || cl.tokens[0] != "cell") throw ParseError(cl.number, "expected 'cell <m>'");
  const double cell = parse_double(cl.tokens[1], cl.number);
  if (cell <= 0.0) throw ParseError(cl.number, "cell must be positive");
  const auto& nl = lines[2];
  if (nl.tokens.size() != 2 || nl.tokens[0] != "count") throw ParseError(nl.number, "expected 'count <N>'");
  const long long count = parse_int(nl.tokens[1], nl.number);
  if (count < 1) throw ParseError(nl.number, "map must contain at least one point");
  const std::size_t have = lines.size() - 3;
  if (have != static_cast<std::size_t>(count)) {
    throw ParseError(lines.back().number, "count mismatch: header says " + std::to_string(count) +
                                              ", file has " + std::to_string(have) + " points");
  }
  PointCloud2D pts;
  pts.reserve(have);
  for (std::size_t k = 3; k < lines.size(); ++k) {
    const auto& l = lines[k];
    if (l.tokens.size() != 2) throw ParseError(l.number, "expected 'x y'");
    pts.push_back({parse_double(l.tokens[0], l.number), parse_double(l.tokens[1], l.number)});
  }
  return make_reference_map(std::move(pts), cell, raster_resolution);
}

ReferenceMap load_refmap(const std::string& path, double raster_resolution) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open reference map '" + path + "'");
  return read_refmap(in, raster_resolution);
}

DriveTape parse_tape(std::istream& in) {
  auto lines = read_lines(in);
  std::erase_if(lines, [](const TextLine& l) { return l.tokens.empty() || l.tokens[0][0] == '#'; });
  if (lines.empty()) throw ParseError(0, "empty drive tape");
  expect_header(lines[0], "TAPE", 1);
  DriveTape tape;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& l = lines[k];
    const auto& t = l.tokens;
    if (t[0] == "dt") {
      if (t.size() != 2) throw ParseError(l.number, "expected 'dt <s>'");
      tape.dt = parse_double(t[1], l.number);
      if (tape.dt <= 0.0) throw ParseError(l.number, "dt must be positive");
    } else if (t[0] == "cmd") {
      if (t.size() != 4) throw ParseError(l.number, "expected 'cmd <v> <omega> <steps>'");
      const sim::VelocityCommand c{parse_double(t[1], l.number), parse_double(t[2], l.number)};
      const long long steps = parse_int(t[3], l.number);
      if (steps < 0) throw ParseError(l.number, "steps must be non-negative");
      tape.commands.insert(tape.commands.end(), static_cast<std::size_t>(steps), c);
    } else {
      throw ParseError(l.number, "unknown tape key '" + t[0] + "'");
    }
  }
  return tape;
}

DriveTape load_tape(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open drive tape '" + path + "'");
  return parse_tape(in);
}

TeleopLog record_drive(const sim::World& world_in, const DriveTape& tape, const sim::LidarConfig& lidar,
                       const sim::MotionNoise& noise, std::uint64_t seed, double robot_radius) {
  // The survey drive sees only fixed structure. A patrolling disc would be smeared into
  // the map and can also block the scripted route, after which the tape no longer fits.
  sim::World world = world_in;
  world.obstacles.clear();
  sim::Rng rng(seed);
  sim::RobotState state;
  state.truth = world.start;
  state.odom = world.start;  // map frame coincides with the world frame
  TeleopLog log;
  log.reserve(tape.commands.size() + 1);
  for (const auto& cmd : tape.commands) {
    log.push_back({state.odom, sim::simulate_scan(world, state.truth, lidar, noise.range_sigma, rng)});
    state = sim::step(world, state, cmd, tape.dt, noise, rng, robot_radius);
  }
  log.push_back({state.odom, sim::simulate_scan(world, state.truth, lidar, noise.range_sigma, rng)});
  return log;
}

}  // namespace wpnav::refmap
