#include "wpnav/nav.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace wpnav::nav {

namespace {

constexpr double kFar = 1e20;

// Felzenszwalb-Huttenlocher lower envelope of parabolas.
void edt_1d(const double* f, int n, double* d, std::vector<int>& v, std::vector<double>& z) {
  auto intersect = [&](int q, int p) {
    return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * q - 2.0 * p);
  };
  int k = 0;
  v[0] = 0;
  z[0] = -HUGE_VAL;
  z[1] = HUGE_VAL;
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = HUGE_VAL;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

std::uint8_t inflated_cost(double d, const CostmapParams& p) {
  const double c = 252.0 * std::exp(-p.cost_scaling * (d - p.robot_radius));
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(c), 1, kMaxInflated));
}

}  // namespace

const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Ok: return "ok";
    case PlanStatus::StartOutside: return "start_outside";
    case PlanStatus::GoalOutside: return "goal_outside";
    case PlanStatus::StartBlocked: return "start_blocked";
    case PlanStatus::GoalBlocked: return "goal_blocked";
    case PlanStatus::Unreachable: return "unreachable";
  }
  return "?";
}

std::vector<double> squared_distance_transform(const GridGeometry& g, const std::vector<std::uint8_t>& seeds) {
  const int rows = g.rows;
  const int cols = g.cols;
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = seeds[i] ? 0.0 : kFar;
  const int n = std::max(rows, cols);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) f[r] = out[static_cast<std::size_t>(r) * cols + c];
    edt_1d(f.data(), rows, d.data(), v, z);
    for (int r = 0; r < rows; ++r) out[static_cast<std::size_t>(r) * cols + c] = d[r];
  }
  for (int r = 0; r < rows; ++r) {
    double* row = out.data() + static_cast<std::size_t>(r) * cols;
    std::copy(row, row + cols, f.begin());
    edt_1d(f.data(), cols, d.data(), v, z);
    std::copy(d.begin(), d.begin() + cols, row);
  }
  return out;
}

Costmap build_costmap(const OccupancyLayer& static_layer, std::span<const Point2> obstacle_points,
                      const Pose2D& robot, const CostmapParams& params) {
  const GridGeometry& g = static_layer.geometry;
  Costmap map;
  map.geometry = g;
  map.inflation_radius = params.inflation_radius;
  std::vector<std::uint8_t> lethal = static_layer.data;
  for (const Point2 p : obstacle_points) {
    const Cell c = g.cell_of(p);
    if (g.contains(c)) lethal[g.index(c)] = 1;
  }
  const Cell rc = g.cell_of(robot.position());
  if (g.contains(rc) && lethal[g.index(rc)]) {
    const int span = static_cast<int>(std::ceil(params.robot_radius / g.resolution));
    for (int dr = -span; dr <= span; ++dr) {
      for (int dc = -span; dc <= span; ++dc) {
        const Cell c{rc.row + dr, rc.col + dc};
        if (!g.contains(c)) continue;
        if (norm(g.center(c) - robot.position()) <= params.robot_radius || c == rc) lethal[g.index(c)] = 0;
      }
    }
    map.cleared_robot_cell = true;
  }

  const auto d2 = squared_distance_transform(g, lethal);
  const double inscribed = std::min(params.inscribed_radius, params.inflation_radius);
  map.cost.assign(g.size(), kFree);
  for (std::size_t i = 0; i < map.cost.size(); ++i) {
    if (lethal[i]) {
      map.cost[i] = kLethal;
      continue;
    }
    const double d = std::sqrt(d2[i]) * g.resolution;
    if (d <= inscribed) {
      map.cost[i] = kInscribed;
    } else if (d <= params.inflation_radius) {
      map.cost[i] = inflated_cost(d, params);
    }
  }
  return map;
}

Costmap build_costmap(const OccupancyLayer& static_layer, const sim::LidarScan& scan, const Pose2D& robot,
                      const CostmapParams& params) {
  auto pts = scan.hit_points();
  for (auto& p : pts) p = transform_point(robot, p);
  return build_costmap(static_layer, pts, robot, params);
}

bool traversable(const Costmap& map, Cell c, Point2 start, const PlannerOptions& opt) {
  if (!map.geometry.contains(c)) return false;
  const std::uint8_t v = map.at(c);
  if (v == kLethal) return false;
  if (v == kInscribed) return norm(map.geometry.center(c) - start) <= opt.escape_radius;
  return true;
}

PlanResult plan(const Costmap& map, const Pose2D& start, const Pose2D& goal, const PlannerOptions& opt) {
  const GridGeometry& g = map.geometry;
  PlanResult out;
  const Cell sc = g.cell_of(start.position());
  const Cell gc = g.cell_of(goal.position());
  if (!g.contains(sc)) {
    out.status = PlanStatus::StartOutside;
    return out;
  }
  if (!g.contains(gc)) {
    out.status = PlanStatus::GoalOutside;
    return out;
  }
  if (map.at(sc) == kLethal) {
    out.status = PlanStatus::StartBlocked;
    return out;
  }
  const Point2 sp = start.position();
  if (!traversable(map, gc, sp, opt)) {
    out.status = PlanStatus::GoalBlocked;
    return out;
  }

  const std::size_t n = g.size();
  std::vector<double> dist(n, HUGE_VAL);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> done(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  const std::size_t s_idx = g.index(sc);
  const std::size_t g_idx = g.index(gc);
  dist[s_idx] = 0.0;
  open.push({0.0, s_idx});
  static constexpr int kDr[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDc[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const double diag = std::sqrt(2.0);
  while (!open.empty()) {
    const auto [d, idx] = open.top();
    open.pop();
    if (done[idx]) continue;
    done[idx] = 1;
    if (idx == g_idx) break;
    const Cell c = g.cell_at(idx);
    for (int k = 0; k < 8; ++k) {
      const Cell nc{c.row + kDr[k], c.col + kDc[k]};
      if (!traversable(map, nc, sp, opt)) continue;
      const bool is_diag = k >= 4;
      if (is_diag && (!traversable(map, {c.row + kDr[k], c.col}, sp, opt) ||
                      !traversable(map, {c.row, c.col + kDc[k]}, sp, opt))) {
        continue;
      }
      const std::size_t ni = g.index(nc);
      if (done[ni]) continue;
      const double step = (is_diag ? diag : 1.0) * (1.0 + map.cost[ni] / 252.0);
      if (d + step < dist[ni]) {
        dist[ni] = d + step;
        parent[ni] = static_cast<std::int64_t>(idx);
        open.push({dist[ni], ni});
      }
    }
  }
  if (!done[g_idx]) {
    out.status = PlanStatus::Unreachable;
    return out;
  }

  std::vector<Cell> cells;
  for (std::int64_t i = static_cast<std::int64_t>(g_idx); i >= 0; i = parent[i]) {
    cells.push_back(g.cell_at(static_cast<std::size_t>(i)));
  }
  std::reverse(cells.begin(), cells.end());
  Path& path = out.path;
  path.start = start;
  path.goal = goal;
  path.cost = dist[g_idx];
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0 && k + 1 < cells.size()) {
      const int dr0 = cells[k].row - cells[k - 1].row;
      const int dc0 = cells[k].col - cells[k - 1].col;
      const int dr1 = cells[k + 1].row - cells[k].row;
      const int dc1 = cells[k + 1].col - cells[k].col;
      if (dr0 == dr1 && dc0 == dc1) continue;
    }
    path.points.push_back(g.center(cells[k]));
  }
  out.status = PlanStatus::Ok;
  return out;
}

bool path_blocked(const Costmap& map, const Path& path, std::size_t from_vertex) {
  const GridGeometry& g = map.geometry;
  for (std::size_t k = from_vertex; k + 1 < path.points.size(); ++k) {
    const Point2 a = path.points[k];
    const Point2 b = path.points[k + 1];
    const double len = norm(b - a);
    if (len <= 0.0) continue;
    bool blocked = false;
    traverse_ray(g, a, (1.0 / len) * (b - a), len, [&](Cell c, double t) {
      if (t >= len) return true;
      if (g.contains(c) && map.at(c) == kLethal) {
        blocked = true;
        return true;
      }
      return false;
    });
    if (blocked) return true;
  }
  return false;
}

void PathFollower::set_path(Path path) {
  path_ = std::move(path);
  progress_ = 0;
}

sim::VelocityCommand PathFollower::step(const Pose2D& pose) {
  if (path_.points.empty()) throw std::logic_error("control step without a path");
  const Point2 goal = path_.goal.position();
  const Point2 here = pose.position();
  const double to_goal = norm(goal - here);

  if (to_goal <= params_.arrive_radius) aligning_ = true;
  if (to_goal > params_.arrive_radius + 0.1) aligning_ = false;
  if (aligning_) {
    const double err = wrap_angle(path_.goal.yaw - pose.yaw);
    return {0.0, std::clamp(params_.yaw_gain * err, -limits_.w_max, limits_.w_max)};
  }

  // Polyline to follow: path vertices with the exact goal as the last point.
  std::vector<Point2> pts = path_.points;
  pts.back() = goal;
  if (pts.size() == 1) pts.insert(pts.begin(), here);

  // Closest point on the remaining segments; progress never moves backwards.
  double best_d2 = HUGE_VAL;
  std::size_t best_seg = progress_;
  Point2 proj = pts[std::min(progress_, pts.size() - 1)];
  for (std::size_t k = progress_; k + 1 < pts.size(); ++k) {
    const Point2 a = pts[k];
    const Point2 ab = pts[k + 1] - a;
    const double l2 = dot(ab, ab);
    const double t = l2 > 0.0 ? std::clamp(dot(here - a, ab) / l2, 0.0, 1.0) : 0.0;
    const Point2 q = a + t * ab;
    const double d2 = squared_distance(q, here);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_seg = k;
      proj = q;
    }
  }
  progress_ = best_seg;

  Point2 target = pts.back();
  double remaining = params_.lookahead;
  Point2 cur = proj;
  for (std::size_t k = best_seg; k + 1 < pts.size(); ++k) {
    const Point2 next = pts[k + 1];
    const double seg = norm(next - cur);
    if (seg >= remaining) {
      target = cur + (remaining / seg) * (next - cur);
      break;
    }
    remaining -= seg;
    cur = next;
  }

  const Point2 rel = transform_point(inverse(pose), target);
  const double alpha = std::atan2(rel.y, rel.x);
  if (std::abs(alpha) > params_.rotate_threshold) {
    return {0.0, alpha > 0.0 ? limits_.w_max : -limits_.w_max};
  }
  const double ld = std::max(norm(rel), 1e-6);
  double v = limits_.v_max * std::clamp(to_goal / params_.slow_radius, 0.2, 1.0);
  double omega = 2.0 * v * std::sin(alpha) / ld;
  if (std::abs(omega) > limits_.w_max) {
    v *= limits_.w_max / std::abs(omega);
    omega = omega > 0.0 ? limits_.w_max : -limits_.w_max;
  }
  return {v, omega};
}

sim::VelocityCommand control_step(const Pose2D& pose, const Path& path, const ControlLimits& limits,
                                  const ControllerParams& params) {
  PathFollower f(limits, params);
  f.set_path(path);
  return f.step(pose);
}

bool goal_reached(const Pose2D& pose, const Pose2D& goal, const GoalTolerance& tol) {
  const PoseError e = pose_error(pose, goal);
  return e.trans <= tol.xy_tol && e.rot <= tol.yaw_tol;
}

}  // namespace wpnav::nav
