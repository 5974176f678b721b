#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "wpnav/geom.hpp"
#include "wpnav/grid.hpp"
#include "wpnav/worldsim.hpp"

namespace wpnav::slam {

struct SlamConfig {
  double resolution = 0.1;
  double extent = 60.0;  // side length of the square grid centred on the session origin
  double hit = 0.85;
  double miss = -0.4;
  double clamp = 5.0;
  std::size_t bootstrap_cells = 100;
  double yaw_step = 0.5 * kPi / 180.0;
  int levels = 2;
  int max_moves = 20;
  double match_sigma = 0.05;  // spread of the endpoint likelihood around a cell's mean hit
};

/// Log-odds occupancy grid anchored at the session start pose.
class OnlineGrid {
 public:
  explicit OnlineGrid(const SlamConfig& cfg = {});

  const GridGeometry& geometry() const { return log_odds_.geometry; }
  const SlamConfig& config() const { return cfg_; }
  double log_odds(Cell c) const { return log_odds_.at(c); }
  double probability(Cell c) const { return prob_.at(c); }
  /// Bilinear interpolation of the occupancy probability between cell centres.
  double probability_at(Point2 p) const;
  bool occupied(Cell c) const { return log_odds_.at(c) > 0.0; }
  std::size_t occupied_count() const { return occupied_count_; }
  /// Endpoint likelihood: Gaussian in the distance from `p` to the nearest mean hit
  /// position among occupied cells in the 3x3 block around `p`; 0 if there is none.
  double likelihood_at(Point2 p) const;
  /// Bounding box of every cell ever updated, or nullopt if none.
  std::optional<std::pair<Cell, Cell>> touched() const;

  void update(Cell c, double increment);
  /// Accumulates a beam endpoint into the running mean hit position of its cell.
  void add_hit(Cell c, Point2 p);

 private:
  SlamConfig cfg_;
  Grid<double> log_odds_;
  Grid<double> prob_;
  Grid<Point2> hit_sum_;
  Grid<std::uint32_t> hit_count_;
  std::size_t occupied_count_ = 0;
  Cell lo_{1 << 30, 1 << 30};
  Cell hi_{-1, -1};
};

struct SlamState {
  OnlineGrid grid;
  Pose2D estimate;  // session frame
};

SlamState slam_init(const SlamConfig& cfg = {});

/// Sum of likelihood_at over the scan endpoints placed at `pose`.
double match_score(const OnlineGrid& grid, std::span<const Point2> hits, const Pose2D& pose);
Pose2D scan_match(const OnlineGrid& grid, const sim::LidarScan& scan, const Pose2D& guess);
void integrate_scan(OnlineGrid& grid, const Pose2D& pose, const sim::LidarScan& scan);
/// guess = estimate ⊕ odom_delta, refined by scan matching, then mapped.
const Pose2D& slam_step(SlamState& state, const Pose2D& odom_delta, const sim::LidarScan& scan);

/// Session-frame SLAM fed with raw odometry readings.
class GridSlam {
 public:
  explicit GridSlam(const SlamConfig& cfg = {}) : state_(slam_init(cfg)) {}

  const Pose2D& update(const Pose2D& odom, const sim::LidarScan& scan);
  const Pose2D& estimate() const { return state_.estimate; }
  const OnlineGrid& grid() const { return state_.grid; }

 private:
  SlamState state_;
  std::optional<Pose2D> last_odom_;
};

/// Occupied cells (log-odds > 0) over the explored area plus `include` points,
/// padded by `margin` metres and clipped to the grid.
OccupancyLayer occupancy_window(const OnlineGrid& grid, std::span<const Point2> include, double margin);

/// Debug dump: portable graymap plus a "<path>.meta" sidecar.
void write_pgm(const OnlineGrid& grid, const std::string& path);

}  // namespace wpnav::slam
