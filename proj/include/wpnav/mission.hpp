#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wpnav/geom.hpp"
#include "wpnav/gridslam.hpp"
#include "wpnav/localizer.hpp"
#include "wpnav/nav.hpp"
#include "wpnav/refmap.hpp"
#include "wpnav/worldsim.hpp"

namespace wpnav::mission {

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  int index = 0;  // 1-based

  Pose2D pose() const { return Pose2D::make(x, y, yaw); }
};

using WaypointList = std::vector<Waypoint>;

WaypointList parse_waypoints(std::istream& in);
WaypointList load_waypoints(const std::string& path);
void write_waypoints(std::ostream& out, const WaypointList& wps);

enum class Status { Reached, FailedTimeout, FailedNoPath, FailedLocalization };
const char* to_string(Status s);
std::optional<Status> parse_status(const std::string& s);

enum class LocalizerKind { PriorMap, GridSlam };
const char* to_string(LocalizerKind k);  // "icp" / "gridslam"
std::optional<LocalizerKind> parse_kind(const std::string& s);

struct WaypointOutcome {
  int index = 0;
  Status status = Status::Reached;
  std::optional<Pose2D> truth;  // ground truth at the arrival instant
  double sim_time = 0.0;
};

struct SessionRecord {
  std::vector<WaypointOutcome> entries;  // stops at the first failure
  LocalizerKind kind = LocalizerKind::PriorMap;
  std::uint64_t seed = 0;
  int phase = 1;
  Pose2D initial_offset;

  bool reached(int index) const;
};

struct MissionConfig {
  double dt = 0.1;
  double timeout_per_wp = 120.0;
  int planner_period = 10;
  int nopath_limit = 5;
  double robot_radius = 0.2;
  nav::GoalTolerance tolerance;
  nav::ControlLimits limits;
  nav::ControllerParams controller;
  nav::CostmapParams costmap;
  nav::PlannerOptions planner;
  sim::LidarConfig lidar;
  sim::MotionNoise noise;
  loc::LocalizerConfig localizer;
  slam::SlamConfig slam;
  double slam_window_margin = 2.0;
};

/// Per-step snapshot handed to an optional observer.
struct StepInfo {
  double time = 0.0;
  int waypoint = 0;
  Pose2D truth;
  Pose2D estimate;
  Pose2D odom;
  sim::VelocityCommand cmd;
  bool collided = false;
};

using StepObserver = std::function<void(const StepInfo&)>;

/// Drives the waypoints in order. The prior-map localizer starts believing it is at
/// `believed_start` in the map frame; the grid-SLAM localizer always starts at its own
/// session origin and reads waypoint coordinates as session-frame coordinates.
SessionRecord run_mission(const sim::World& world, const Pose2D& truth_start, const Pose2D& believed_start,
                          LocalizerKind kind, std::shared_ptr<const refmap::ReferenceMap> map,
                          const WaypointList& waypoints, const MissionConfig& cfg, std::uint64_t seed,
                          const StepObserver& observer = {});

}  // namespace wpnav::mission
