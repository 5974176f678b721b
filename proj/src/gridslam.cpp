#include "wpnav/gridslam.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wpnav::slam {

OnlineGrid::OnlineGrid(const SlamConfig& cfg) : cfg_(cfg) {
  if (!(cfg.resolution > 0.0) || !(cfg.extent > cfg.resolution)) {
    throw std::invalid_argument("invalid SLAM grid configuration");
  }
  GridGeometry g;
  g.resolution = cfg.resolution;
  g.cols = g.rows = static_cast<int>(std::ceil(cfg.extent / cfg.resolution));
  g.origin = {-0.5 * g.cols * cfg.resolution, -0.5 * g.rows * cfg.resolution};
  log_odds_ = Grid<double>(g, 0.0);
  prob_ = Grid<double>(g, 0.5);
  hit_sum_ = Grid<Point2>(g, Point2{0.0, 0.0});
  hit_count_ = Grid<std::uint32_t>(g, 0);
}

void OnlineGrid::add_hit(Cell c, Point2 p) {
  if (!hit_count_.contains(c)) return;
  hit_sum_.at(c) = hit_sum_.at(c) + p;
  ++hit_count_.at(c);
}

double OnlineGrid::likelihood_at(Point2 p) const {
  const GridGeometry& g = geometry();
  const Cell c = g.cell_of(p);
  double best = HUGE_VAL;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const Cell n{c.row + dr, c.col + dc};
      if (!g.contains(n) || !occupied(n)) continue;
      const std::uint32_t k = hit_count_.at(n);
      if (k == 0) continue;
      const Point2 mean = (1.0 / k) * hit_sum_.at(n);
      best = std::min(best, squared_distance(p, mean));
    }
  }
  if (best == HUGE_VAL) return 0.0;
  return std::exp(-0.5 * best / (cfg_.match_sigma * cfg_.match_sigma));
}

void OnlineGrid::update(Cell c, double increment) {
  if (!log_odds_.contains(c)) return;
  double& l = log_odds_.at(c);
  const bool was = l > 0.0;
  l = std::clamp(l + increment, -cfg_.clamp, cfg_.clamp);
  const bool now = l > 0.0;
  if (was != now) {
    if (now) {
      ++occupied_count_;
    } else {
      --occupied_count_;
    }
  }
  prob_.at(c) = 1.0 / (1.0 + std::exp(-l));
  lo_ = {std::min(lo_.row, c.row), std::min(lo_.col, c.col)};
  hi_ = {std::max(hi_.row, c.row), std::max(hi_.col, c.col)};
}

std::optional<std::pair<Cell, Cell>> OnlineGrid::touched() const {
  if (hi_.row < 0) return std::nullopt;
  return std::make_pair(lo_, hi_);
}

double OnlineGrid::probability_at(Point2 p) const {
  const GridGeometry& g = geometry();
  const double fx = (p.x - g.origin.x) / g.resolution - 0.5;
  const double fy = (p.y - g.origin.y) / g.resolution - 0.5;
  const int c0 = static_cast<int>(std::floor(fx));
  const int r0 = static_cast<int>(std::floor(fy));
  const double ax = fx - c0;
  const double ay = fy - r0;
  auto at = [&](int r, int c) { return g.contains({r, c}) ? prob_.at({r, c}) : 0.5; };
  return (1 - ay) * ((1 - ax) * at(r0, c0) + ax * at(r0, c0 + 1)) +
         ay * ((1 - ax) * at(r0 + 1, c0) + ax * at(r0 + 1, c0 + 1));
}

SlamState slam_init(const SlamConfig& cfg) { return {OnlineGrid(cfg), Pose2D::identity()}; }

double match_score(const OnlineGrid& grid, std::span<const Point2> hits, const Pose2D& pose) {
  double s = 0.0;
  for (const Point2 h : hits) s += grid.likelihood_at(transform_point(pose, h));
  return s;
}

Pose2D scan_match(const OnlineGrid& grid, const sim::LidarScan& scan, const Pose2D& guess) {
  const SlamConfig& cfg = grid.config();
  if (grid.occupied_count() < cfg.bootstrap_cells) return guess;
  const auto hits = scan.hit_points();
  if (hits.empty()) return guess;

  Pose2D cur = guess;
  double best = match_score(grid, hits, cur);
  double step_xy = cfg.resolution;
  double step_yaw = cfg.yaw_step;
  for (int level = 0; level < cfg.levels; ++level) {
    for (int move = 0; move < cfg.max_moves; ++move) {
      const std::array<Pose2D, 6> cands = {
          Pose2D{cur.x + step_xy, cur.y, cur.yaw}, Pose2D{cur.x - step_xy, cur.y, cur.yaw},
          Pose2D{cur.x, cur.y + step_xy, cur.yaw}, Pose2D{cur.x, cur.y - step_xy, cur.yaw},
          Pose2D::make(cur.x, cur.y, cur.yaw + step_yaw), Pose2D::make(cur.x, cur.y, cur.yaw - step_yaw)};
      double cand_best = best;
      int pick = -1;
      for (int k = 0; k < 6; ++k) {
        const double s = match_score(grid, hits, cands[k]);
        if (s > cand_best) {
          cand_best = s;
          pick = k;
        }
      }
      if (pick < 0) break;
      cur = cands[pick];
      best = cand_best;
    }
    step_xy *= 0.5;
    step_yaw *= 0.5;
  }
  return cur;
}

void integrate_scan(OnlineGrid& grid, const Pose2D& pose, const sim::LidarScan& scan) {
  const SlamConfig& cfg = grid.config();
  const GridGeometry& g = grid.geometry();
  const Point2 from = pose.position();
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double a = pose.yaw + scan.angles[i];
    const double r = scan.ranges[i];
    const Point2 dir{std::cos(a), std::sin(a)};
    const Point2 end = from + r * dir;
    const Cell end_cell = g.cell_of(end);
    traverse_ray(g, from, dir, r, [&](Cell c, double t) {
      if (c == end_cell || t >= r) return true;
      grid.update(c, cfg.miss);
      return false;
    });
    if (scan.hit[i]) {
      grid.update(end_cell, cfg.hit);
      grid.add_hit(end_cell, end);
    } else {
      grid.update(end_cell, cfg.miss);
    }
  }
}

const Pose2D& slam_step(SlamState& state, const Pose2D& odom_delta, const sim::LidarScan& scan) {
  const Pose2D guess = compose(state.estimate, odom_delta);
  state.estimate = scan_match(state.grid, scan, guess);
  integrate_scan(state.grid, state.estimate, scan);
  return state.estimate;
}

const Pose2D& GridSlam::update(const Pose2D& odom, const sim::LidarScan& scan) {
  const Pose2D delta = last_odom_ ? relative(*last_odom_, odom) : Pose2D::identity();
  last_odom_ = odom;
  return slam_step(state_, delta, scan);
}

OccupancyLayer occupancy_window(const OnlineGrid& grid, std::span<const Point2> include, double margin) {
  const GridGeometry& g = grid.geometry();
  int r0 = g.rows, c0 = g.cols, r1 = -1, c1 = -1;
  auto grow = [&](Cell c) {
    r0 = std::min(r0, c.row);
    c0 = std::min(c0, c.col);
    r1 = std::max(r1, c.row);
    c1 = std::max(c1, c.col);
  };
  if (auto t = grid.touched()) {
    grow(t->first);
    grow(t->second);
  }
  for (const Point2 p : include) grow(g.cell_of(p));
  if (r1 < 0) grow(g.cell_of({0.0, 0.0}));
  const int pad = static_cast<int>(std::ceil(margin / g.resolution));
  r0 = std::max(0, r0 - pad);
  c0 = std::max(0, c0 - pad);
  r1 = std::min(g.rows - 1, r1 + pad);
  c1 = std::min(g.cols - 1, c1 + pad);

  GridGeometry w;
  w.resolution = g.resolution;
  w.rows = std::max(1, r1 - r0 + 1);
  w.cols = std::max(1, c1 - c0 + 1);
  w.origin = {g.origin.x + c0 * g.resolution, g.origin.y + r0 * g.resolution};
  OccupancyLayer out(w, 0);
  for (int r = 0; r < w.rows; ++r) {
    for (int c = 0; c < w.cols; ++c) {
      const Cell src{r0 + r, c0 + c};
      if (g.contains(src) && grid.occupied(src)) out.at({r, c}) = 1;
    }
  }
  return out;
}

void write_pgm(const OnlineGrid& grid, const std::string& path) {
  const GridGeometry& g = grid.geometry();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "P2\n" << g.cols << ' ' << g.rows << "\n255\n";
  for (int r = g.rows - 1; r >= 0; --r) {
    for (int c = 0; c < g.cols; ++c) {
      const int v = static_cast<int>(std::lround(255.0 * (1.0 - grid.probability({r, c}))));
      out << v << (c + 1 == g.cols ? '\n' : ' ');
    }
  }
  std::ofstream meta(path + ".meta");
  meta << "resolution " << g.resolution << "\norigin " << g.origin.x << ' ' << g.origin.y << "\n";
}

}  // namespace wpnav::slam
