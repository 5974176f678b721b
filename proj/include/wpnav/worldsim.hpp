#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "wpnav/geom.hpp"
#include "wpnav/grid.hpp"

namespace wpnav::sim {

using Rng = std::mt19937_64;

/// Static ground-truth environment. The grid lives in its own frame whose pose
/// in the world frame is `origin`; cell (0, 0) has its lower-left corner there.
struct WorldMap {
  int rows = 0;
  int cols = 0;
  double resolution = 0.1;
  Pose2D origin;
  std::vector<std::uint8_t> cells;  // row-major, row 0 at the bottom

  bool occupied(Cell c) const;  // outside the grid counts as occupied
  bool occupied_at(Point2 world) const;
  /// Cell geometry in the grid frame (origin at (0, 0)).
  GridGeometry grid_frame() const { return {rows, cols, resolution, {0.0, 0.0}}; }
  /// True if any occupied cell comes closer than `radius` to `world`.
  bool disc_collides(Point2 world, double radius) const;
};

/// Moving disc that loops along a closed polyline.
struct DynamicObstacle {
  double radius = 0.3;
  std::vector<Point2> path;
  double speed = 0.0;
  double phase = 0.0;  // arc length travelled along the loop

  double loop_length() const;
  Point2 position() const;
};

struct World {
  WorldMap map;
  std::vector<DynamicObstacle> obstacles;
  Pose2D start;
};

World parse_world(std::istream& in);
World load_world(const std::string& path);

/// Odometry-model noise coefficients (variances scale with squared motion) and
/// lidar range noise.
struct MotionNoise {
  double a1 = 0.01;
  double a2 = 0.005;
  double a3 = 0.01;
  double a4 = 0.005;
  double range_sigma = 0.01;

  static MotionNoise zero() { return {0.0, 0.0, 0.0, 0.0, 0.0}; }
  bool odometry_is_exact() const { return a1 == 0.0 && a2 == 0.0 && a3 == 0.0 && a4 == 0.0; }
};

struct VelocityCommand {
  double v = 0.0;
  double omega = 0.0;
};

struct RobotState {
  Pose2D truth;  // world frame
  Pose2D odom;   // dead-reckoned, session frame
  double v = 0.0;
  double omega = 0.0;
  bool collided = false;
};

/// Exact unicycle displacement for a constant command held for `dt`.
Pose2D arc_motion(VelocityCommand cmd, double dt);

/// Perturbs an executed motion increment with the a1..a4 odometry model.
Pose2D sample_odometry(const Pose2D& delta, const MotionNoise& noise, Rng& rng);

/// Advances the robot. Truth follows the commanded arc until contact with a wall or
/// obstacle disc; odometry integrates the executed motion perturbed by noise.
RobotState step(const World& world, const RobotState& state, VelocityCommand cmd, double dt,
                const MotionNoise& noise, Rng& rng, double robot_radius);

struct LidarConfig {
  int beams = 360;
  double max_range = 20.0;
};

struct LidarScan {
  std::vector<double> angles;
  std::vector<double> ranges;
  std::vector<std::uint8_t> hit;
  double max_range = 20.0;

  std::size_t size() const { return ranges.size(); }
  /// Hit endpoints in the sensor frame.
  std::vector<Point2> hit_points() const;
};

/// Beam angles, beam 0 pointing along the sensor heading.
std::vector<double> beam_angles(int beams);

LidarScan simulate_scan(const World& world, const Pose2D& truth, const LidarConfig& lidar,
                        double range_sigma, Rng& rng);

/// Distance along the ray to the first occupied cell or obstacle disc; `max_range`
/// if nothing is hit. Exposed for testing.
double cast_ray(const World& world, Point2 from, double angle, double max_range, bool* hit);

void advance_obstacles(std::vector<DynamicObstacle>& obstacles, double dt);

}  // namespace wpnav::sim
