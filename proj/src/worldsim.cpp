#include "wpnav/worldsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "wpnav/textio.hpp"

namespace wpnav::sim {

namespace {

double gaussian(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

double point_rect_distance(Point2 q, double x0, double y0, double x1, double y1) {
  const double dx = std::max({x0 - q.x, 0.0, q.x - x1});
  const double dy = std::max({y0 - q.y, 0.0, q.y - y1});
  return std::hypot(dx, dy);
}

}  // namespace

bool WorldMap::occupied(Cell c) const {
  if (c.row < 0 || c.col < 0 || c.row >= rows || c.col >= cols) return true;
  return cells[static_cast<std::size_t>(c.row) * cols + c.col] != 0;
}

bool WorldMap::occupied_at(Point2 world) const {
  const Point2 q = transform_point(inverse(origin), world);
  return occupied(grid_frame().cell_of(q));
}

bool WorldMap::disc_collides(Point2 world, double radius) const {
  const Point2 q = transform_point(inverse(origin), world);
  const int c0 = static_cast<int>(std::floor((q.x - radius) / resolution));
  const int c1 = static_cast<int>(std::floor((q.x + radius) / resolution));
  const int r0 = static_cast<int>(std::floor((q.y - radius) / resolution));
  const int r1 = static_cast<int>(std::floor((q.y + radius) / resolution));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (!occupied({r, c})) continue;
      const double d = point_rect_distance(q, c * resolution, r * resolution, (c + 1) * resolution,
                                           (r + 1) * resolution);
      if (d < radius) return true;
    }
  }
  return false;
}

double DynamicObstacle::loop_length() const {
  double len = 0.0;
  if (path.size() < 2) return 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    len += norm(path[(i + 1) % path.size()] - path[i]);
  }
  return len;
}

Point2 DynamicObstacle::position() const {
  const double len = loop_length();
  if (len <= 0.0) return path.front();
  double s = std::fmod(phase, len);
  if (s < 0.0) s += len;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Point2 a = path[i];
    const Point2 b = path[(i + 1) % path.size()];
    const double seg = norm(b - a);
    if (s <= seg && seg > 0.0) return a + (s / seg) * (b - a);
    s -= seg;
  }
  return path.front();
}

World parse_world(std::istream& in) {
  const auto lines = read_lines(in);
  World w;
  std::size_t i = 0;
  auto skip_blank = [&] {
    while (i < lines.size() && (lines[i].tokens.empty() || lines[i].tokens[0][0] == '#')) ++i;
  };
  skip_blank();
  if (i >= lines.size()) throw ParseError(0, "empty world file");
  expect_header(lines[i++], "WORLD", 1);

  bool have_res = false;
  bool have_start = false;
  int rows = -1;
  int cols = -1;
  int grid_line = 0;
  while (true) {
    skip_blank();
    if (i >= lines.size()) throw ParseError(lines.back().number, "missing 'grid' section");
    const TextLine& l = lines[i++];
    const auto& t = l.tokens;
    if (t[0] == "resolution") {
      if (t.size() != 2) throw ParseError(l.number, "expected 'resolution <m>'");
      w.map.resolution = parse_double(t[1], l.number);
      if (w.map.resolution <= 0.0) throw ParseError(l.number, "resolution must be positive");
      have_res = true;
    } else if (t[0] == "start") {
      if (t.size() != 4) throw ParseError(l.number, "expected 'start <x> <y> <yaw>'");
      w.start = Pose2D::make(parse_double(t[1], l.number), parse_double(t[2], l.number),
                             parse_double(t[3], l.number));
      have_start = true;
    } else if (t[0] == "origin") {
      if (t.size() != 4) throw ParseError(l.number, "expected 'origin <x> <y> <yaw>'");
      w.map.origin = Pose2D::make(parse_double(t[1], l.number), parse_double(t[2], l.number),
                                  parse_double(t[3], l.number));
    } else if (t[0] == "obstacle") {
      if (t.size() < 5 || (t.size() - 3) % 2 != 0) {
        throw ParseError(l.number, "expected 'obstacle <radius> <speed> <x1> <y1> [...]'");
      }
      DynamicObstacle ob;
      ob.radius = parse_double(t[1], l.number);
      ob.speed = parse_double(t[2], l.number);
      if (ob.radius <= 0.0) throw ParseError(l.number, "obstacle radius must be positive");
      if (ob.speed < 0.0) throw ParseError(l.number, "obstacle speed must be non-negative");
      for (std::size_t k = 3; k < t.size(); k += 2) {
        ob.path.push_back({parse_double(t[k], l.number), parse_double(t[k + 1], l.number)});
      }
      w.obstacles.push_back(std::move(ob));
    } else if (t[0] == "grid") {
      if (t.size() != 3) throw ParseError(l.number, "expected 'grid <rows> <cols>'");
      rows = static_cast<int>(parse_int(t[1], l.number));
      cols = static_cast<int>(parse_int(t[2], l.number));
      if (rows < 1 || cols < 1) throw ParseError(l.number, "grid must be non-empty");
      grid_line = l.number;
      break;
    } else {
      throw ParseError(l.number, "unknown key '" + t[0] + "'");
    }
  }
  if (!have_res) throw ParseError(grid_line, "missing 'resolution'");
  if (!have_start) throw ParseError(grid_line, "missing 'start'");

  w.map.rows = rows;
  w.map.cols = cols;
  w.map.cells.assign(static_cast<std::size_t>(rows) * cols, 0);
  for (int k = 0; k < rows; ++k) {
    if (i >= lines.size()) {
      throw ParseError(lines.back().number, "grid truncated: expected " + std::to_string(rows) + " rows");
    }
    const TextLine& l = lines[i++];
    if (static_cast<int>(l.text.size()) != cols) {
      throw ParseError(l.number, "grid row has " + std::to_string(l.text.size()) + " glyphs, expected " +
                                     std::to_string(cols));
    }
    const int row = rows - 1 - k;  // first text row is the top of the map
    for (int c = 0; c < cols; ++c) {
      const char g = l.text[c];
      if (g != '#' && g != '.') {
        throw ParseError(l.number, std::string("unknown cell glyph '") + g + "'");
      }
      const bool border = row == 0 || row == rows - 1 || c == 0 || c == cols - 1;
      if (border && g != '#') throw ParseError(l.number, "open boundary: border cells must be '#'");
      w.map.cells[static_cast<std::size_t>(row) * cols + c] = g == '#' ? 1 : 0;
    }
  }
  for (; i < lines.size(); ++i) {
    if (!lines[i].tokens.empty()) throw ParseError(lines[i].number, "unexpected content after grid");
  }
  if (w.map.occupied_at(w.start.position())) throw ParseError(grid_line, "start pose lies in an occupied cell");
  return w;
}

World load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open world file '" + path + "'");
  return parse_world(in);
}

Pose2D arc_motion(VelocityCommand cmd, double dt) {
  const double dtheta = cmd.omega * dt;
  if (std::abs(cmd.omega) < 1e-9) return {cmd.v * dt, 0.0, 0.0};
  const double r = cmd.v / cmd.omega;
  return {r * std::sin(dtheta), r * (1.0 - std::cos(dtheta)), wrap_angle(dtheta)};
}

Pose2D sample_odometry(const Pose2D& delta, const MotionNoise& n, Rng& rng) {
  if (n.odometry_is_exact()) return delta;
  double trans = std::hypot(delta.x, delta.y);
  double rot1 = 0.0;
  if (trans > 1e-9) {
    rot1 = std::atan2(delta.y, delta.x);
    if (delta.x < 0.0) {  // reversing
      rot1 = wrap_angle(rot1 - kPi);
      trans = -trans;
    }
  }
  const double rot2 = wrap_angle(delta.yaw - rot1);
  const double r1 = rot1 - gaussian(rng, std::sqrt(n.a1 * rot1 * rot1 + n.a2 * trans * trans));
  const double tr =
      trans - gaussian(rng, std::sqrt(n.a3 * trans * trans + n.a4 * (rot1 * rot1 + rot2 * rot2)));
  const double r2 = rot2 - gaussian(rng, std::sqrt(n.a1 * rot2 * rot2 + n.a2 * trans * trans));
  return {tr * std::cos(r1), tr * std::sin(r1), wrap_angle(r1 + r2)};
}

RobotState step(const World& world, const RobotState& state, VelocityCommand cmd, double dt,
                const MotionNoise& noise, Rng& rng, double robot_radius) {
  RobotState next = state;
  next.v = cmd.v;
  next.omega = cmd.omega;
  next.collided = false;

  auto pose_at = [&](double s) { return compose(state.truth, arc_motion(cmd, dt * s)); };
  auto blocked = [&](const Pose2D& p) {
    if (world.map.disc_collides(p.position(), robot_radius)) return true;
    for (const auto& ob : world.obstacles) {
      const Point2 c = ob.position();
      const double d_new = norm(p.position() - c);
      if (d_new < robot_radius + ob.radius && d_new < norm(state.truth.position() - c)) return true;
    }
    return false;
  };

  const Pose2D target = pose_at(1.0);
  if (!blocked(target)) {
    next.truth = target;
  } else {
    next.collided = true;
    double lo = 0.0;
    double hi = 1.0;
    for (int k = 0; k < 30; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (blocked(pose_at(mid))) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    next.truth = lo > 0.0 ? pose_at(lo) : state.truth;
  }
  const Pose2D executed = relative(state.truth, next.truth);
  next.odom = compose(state.odom, sample_odometry(executed, noise, rng));
  return next;
}

std::vector<Point2> LidarScan::hit_points() const {
  std::vector<Point2> pts;
  pts.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (!hit[i]) continue;
    pts.push_back({ranges[i] * std::cos(angles[i]), ranges[i] * std::sin(angles[i])});
  }
  return pts;
}

std::vector<double> beam_angles(int beams) {
  std::vector<double> a(static_cast<std::size_t>(beams));
  for (int i = 0; i < beams; ++i) a[i] = wrap_angle(2.0 * kPi * i / beams);
  return a;
}

double cast_ray(const World& world, Point2 from, double angle, double max_range, bool* hit) {
  const WorldMap& m = world.map;
  const Point2 q = transform_point(inverse(m.origin), from);
  const double ga = angle - m.origin.yaw;
  double best = HUGE_VAL;
  traverse_ray(m.grid_frame(), q, {std::cos(ga), std::sin(ga)}, max_range, [&](Cell c, double t) {
    if (t > max_range) return true;
    if (m.occupied(c)) {
      best = t;
      return true;
    }
    return false;
  });
  const Point2 d{std::cos(angle), std::sin(angle)};
  for (const auto& ob : world.obstacles) {
    const Point2 oc = from - ob.position();
    const double b = dot(oc, d);
    const double cc = dot(oc, oc) - ob.radius * ob.radius;
    if (cc < 0.0) continue;  // sensor inside the disc sees through it
    const double disc = b * b - cc;
    if (disc < 0.0) continue;
    const double t = -b - std::sqrt(disc);
    if (t >= 0.0 && t < best) best = t;
  }
  const bool is_hit = best <= max_range;
  if (hit) *hit = is_hit;
  return is_hit ? best : max_range;
}

LidarScan simulate_scan(const World& world, const Pose2D& truth, const LidarConfig& lidar,
                        double range_sigma, Rng& rng) {
  LidarScan scan;
  scan.max_range = lidar.max_range;
  scan.angles = beam_angles(lidar.beams);
  scan.ranges.resize(scan.angles.size());
  scan.hit.resize(scan.angles.size());
  for (std::size_t i = 0; i < scan.angles.size(); ++i) {
    bool hit = false;
    double r = cast_ray(world, truth.position(), truth.yaw + scan.angles[i], lidar.max_range, &hit);
    if (hit) {
      r = std::clamp(r + gaussian(rng, range_sigma), 1e-4, lidar.max_range);
    }
    scan.ranges[i] = r;
    scan.hit[i] = hit ? 1 : 0;
  }
  return scan;
}

void advance_obstacles(std::vector<DynamicObstacle>& obstacles, double dt) {
  for (auto& ob : obstacles) {
    const double len = ob.loop_length();
    if (len <= 0.0) continue;
    ob.phase = std::fmod(ob.phase + ob.speed * dt, len);
  }
}

}  // namespace wpnav::sim
