#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wpnav/geom.hpp"
#include "wpnav/grid.hpp"
#include "wpnav/worldsim.hpp"

namespace wpnav::nav {

inline constexpr std::uint8_t kFree = 0;
inline constexpr std::uint8_t kMaxInflated = 252;
/// Within the inscribed radius of a lethal cell: the footprint would touch it.
inline constexpr std::uint8_t kInscribed = 253;
inline constexpr std::uint8_t kLethal = 254;

struct CostmapParams {
  double inflation_radius = 0.8;
  double robot_radius = 0.2;
  double inscribed_radius = 0.3;
  double cost_scaling = 3.0;  // k in 252 * exp(-k * (d - robot_radius))
};

struct Costmap {
  GridGeometry geometry;
  std::vector<std::uint8_t> cost;
  double inflation_radius = 0.0;
  bool cleared_robot_cell = false;  // recovery fired on this build

  std::uint8_t at(Cell c) const { return cost[geometry.index(c)]; }
};

/// Static layer plus live obstacle points (world/planning frame), inflated by the
/// exact Euclidean distance to the nearest lethal cell.
Costmap build_costmap(const OccupancyLayer& static_layer, std::span<const Point2> obstacle_points,
                      const Pose2D& robot, const CostmapParams& params = {});
/// Same, with the scan's hit endpoints placed using `robot` as the sensor pose.
Costmap build_costmap(const OccupancyLayer& static_layer, const sim::LidarScan& scan, const Pose2D& robot,
                      const CostmapParams& params = {});

/// Squared Euclidean distance (in cells) from every cell to the nearest seed cell.
std::vector<double> squared_distance_transform(const GridGeometry& g, const std::vector<std::uint8_t>& seeds);

struct Path {
  std::vector<Point2> points;  // cell centres, collinear interior cells removed
  Pose2D start;
  Pose2D goal;
  double cost = 0.0;  // in cell lengths
};

enum class PlanStatus { Ok, StartOutside, GoalOutside, StartBlocked, GoalBlocked, Unreachable };

const char* to_string(PlanStatus s);

struct PlanResult {
  PlanStatus status = PlanStatus::Unreachable;
  Path path;
  bool ok() const { return status == PlanStatus::Ok; }
};

struct PlannerOptions {
  /// Inscribed cells this close to the start are still traversable, so a robot
  /// that is already hugging a wall can leave.
  double escape_radius = 0.4;
};

/// Is `c` enterable given the start position? Lethal cells never are; inscribed
/// cells only inside the escape radius.
bool traversable(const Costmap& map, Cell c, Point2 start, const PlannerOptions& opt);

/// 8-connected Dijkstra. Step cost = length (1 or sqrt 2) * (1 + cost/252) of the
/// entered cell. Diagonal moves require both side neighbours to be traversable.
PlanResult plan(const Costmap& map, const Pose2D& start, const Pose2D& goal, const PlannerOptions& opt = {});

/// True if the polyline from vertex `from_vertex` onward crosses a lethal cell.
bool path_blocked(const Costmap& map, const Path& path, std::size_t from_vertex);

struct ControlLimits {
  double v_max = 0.5;
  double w_max = 1.0;
};

struct ControllerParams {
  double lookahead = 0.4;
  double rotate_threshold = 0.8;
  double arrive_radius = 0.1;
  double yaw_gain = 1.5;
  double slow_radius = 0.6;
};

/// Pure pursuit with rotate-in-place. Keeps a monotone progress index along the
/// path between replans.
class PathFollower {
 public:
  explicit PathFollower(ControlLimits limits = {}, ControllerParams params = {})
      : limits_(limits), params_(params) {}

  void set_path(Path path);
  bool has_path() const { return !path_.points.empty(); }
  const Path& path() const { return path_; }
  std::size_t progress() const { return progress_; }
  sim::VelocityCommand step(const Pose2D& pose);

 private:
  ControlLimits limits_;
  ControllerParams params_;
  Path path_;
  std::size_t progress_ = 0;
  bool aligning_ = false;
};

sim::VelocityCommand control_step(const Pose2D& pose, const Path& path, const ControlLimits& limits,
                                  const ControllerParams& params = {});

struct GoalTolerance {
  double xy_tol = 0.25;
  double yaw_tol = 0.05;
};

bool goal_reached(const Pose2D& pose, const Pose2D& goal, const GoalTolerance& tol);

}  // namespace wpnav::nav
