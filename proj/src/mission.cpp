#include "wpnav/mission.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include "wpnav/textio.hpp"

namespace wpnav::mission {

namespace {

class PoseTracker {
 public:
  virtual ~PoseTracker() = default;
  virtual void update(const Pose2D& odom, const sim::LidarScan& scan) = 0;
  virtual Pose2D estimate() const = 0;
  virtual bool lost() const = 0;
  virtual const OccupancyLayer& static_layer(const Pose2D& est, const Pose2D& goal) = 0;
};

class PriorMapTracker final : public PoseTracker {
 public:
  PriorMapTracker(std::shared_ptr<const refmap::ReferenceMap> map, const Pose2D& initial,
                  const loc::LocalizerConfig& cfg)
      : map_(map), loc_(std::move(map), initial, cfg) {}

  void update(const Pose2D& odom, const sim::LidarScan& scan) override {
    loc_.predict(odom);
    loc_.correct(scan);
  }
  Pose2D estimate() const override { return loc_.estimate(); }
  bool lost() const override { return loc_.lost(); }
  const OccupancyLayer& static_layer(const Pose2D&, const Pose2D&) override { return map_->grid; }

 private:
  std::shared_ptr<const refmap::ReferenceMap> map_;
  loc::Localizer loc_;
};

class GridSlamTracker final : public PoseTracker {
 public:
  GridSlamTracker(const slam::SlamConfig& cfg, double margin) : slam_(cfg), margin_(margin) {}

  void update(const Pose2D& odom, const sim::LidarScan& scan) override { slam_.update(odom, scan); }
  Pose2D estimate() const override { return slam_.estimate(); }
  bool lost() const override { return false; }
  const OccupancyLayer& static_layer(const Pose2D& est, const Pose2D& goal) override {
    const Point2 include[] = {est.position(), goal.position()};
    window_ = slam::occupancy_window(slam_.grid(), include, margin_);
    return window_;
  }

 private:
  slam::GridSlam slam_;
  double margin_;
  OccupancyLayer window_;
};

}  // namespace

WaypointList parse_waypoints(std::istream& in) {
  auto lines = read_lines(in);
  std::erase_if(lines, [](const TextLine& l) { return l.tokens.empty() || l.tokens[0][0] == '#'; });
  if (lines.empty()) throw ParseError(0, "empty waypoint file");
  expect_header(lines[0], "WAYPOINTS", 1);
  WaypointList out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& l = lines[k];
    if (l.tokens[0] != "wp" || l.tokens.size() != 4) throw ParseError(l.number, "expected 'wp <x> <y> <yaw>'");
    Waypoint w;
    w.x = parse_double(l.tokens[1], l.number);
    w.y = parse_double(l.tokens[2], l.number);
    w.yaw = wrap_angle(parse_double(l.tokens[3], l.number));
    w.index = static_cast<int>(out.size()) + 1;
    out.push_back(w);
  }
  if (out.empty()) throw ParseError(lines[0].number, "waypoint list is empty");
  return out;
}

WaypointList load_waypoints(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open waypoint file '" + path + "'");
  return parse_waypoints(in);
}

void write_waypoints(std::ostream& out, const WaypointList& wps) {
  out << "WAYPOINTS 1\n";
  for (const auto& w : wps) out << "wp " << format_g9(w.x) << ' ' << format_g9(w.y) << ' ' << format_g9(w.yaw) << '\n';
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Reached: return "REACHED";
    case Status::FailedTimeout: return "FAILED_TIMEOUT";
    case Status::FailedNoPath: return "FAILED_NOPATH";
    case Status::FailedLocalization: return "FAILED_LOCALIZATION";
  }
  return "?";
}

std::optional<Status> parse_status(const std::string& s) {
  for (Status st : {Status::Reached, Status::FailedTimeout, Status::FailedNoPath, Status::FailedLocalization}) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

const char* to_string(LocalizerKind k) { return k == LocalizerKind::PriorMap ? "icp" : "gridslam"; }

std::optional<LocalizerKind> parse_kind(const std::string& s) {
  if (s == "icp") return LocalizerKind::PriorMap;
  if (s == "gridslam") return LocalizerKind::GridSlam;
  return std::nullopt;
}

bool SessionRecord::reached(int index) const {
  for (const auto& e : entries) {
    if (e.index == index) return e.status == Status::Reached;
  }
  return false;
}

SessionRecord run_mission(const sim::World& world_in, const Pose2D& truth_start, const Pose2D& believed_start,
                          LocalizerKind kind, std::shared_ptr<const refmap::ReferenceMap> map,
                          const WaypointList& waypoints, const MissionConfig& cfg, std::uint64_t seed,
                          const StepObserver& observer) {
  if (waypoints.empty()) throw std::invalid_argument("mission needs at least one waypoint");
  SessionRecord rec;
  rec.kind = kind;
  rec.seed = seed;

  sim::World world = world_in;
  sim::Rng rng(seed);
  sim::RobotState state;
  state.truth = truth_start;

  std::unique_ptr<PoseTracker> tracker;
  if (kind == LocalizerKind::PriorMap) {
    if (!map) throw std::invalid_argument("prior-map localization needs a reference map");
    tracker = std::make_unique<PriorMapTracker>(map, believed_start, cfg.localizer);
  } else {
    tracker = std::make_unique<GridSlamTracker>(cfg.slam, cfg.slam_window_margin);
  }

  long steps = 0;
  double t = 0.0;
  for (const Waypoint& wp : waypoints) {
    const Pose2D goal = wp.pose();
    nav::PathFollower follower(cfg.limits, cfg.controller);
    int since_plan = cfg.planner_period;
    int nopath = 0;
    const double t0 = t;
    while (true) {
      const sim::LidarScan scan = sim::simulate_scan(world, state.truth, cfg.lidar, cfg.noise.range_sigma, rng);
      tracker->update(state.odom, scan);
      if (tracker->lost()) {
        rec.entries.push_back({wp.index, Status::FailedLocalization, std::nullopt, t});
        return rec;
      }
      const Pose2D est = tracker->estimate();
      if (nav::goal_reached(est, goal, cfg.tolerance)) {
        rec.entries.push_back({wp.index, Status::Reached, state.truth, t});
        break;
      }
      if (t - t0 >= cfg.timeout_per_wp) {
        rec.entries.push_back({wp.index, Status::FailedTimeout, std::nullopt, t});
        return rec;
      }

      const auto& layer = tracker->static_layer(est, goal);
      const nav::Costmap costmap = nav::build_costmap(layer, scan, est, cfg.costmap);
      const bool blocked = follower.has_path() && nav::path_blocked(costmap, follower.path(), follower.progress());
      if (since_plan >= cfg.planner_period || blocked) {
        since_plan = 0;
        auto planned = nav::plan(costmap, est, goal, cfg.planner);
        if (planned.ok()) {
          follower.set_path(std::move(planned.path));
          nopath = 0;
        } else {
          follower = nav::PathFollower(cfg.limits, cfg.controller);
          if (++nopath >= cfg.nopath_limit) {
            rec.entries.push_back({wp.index, Status::FailedNoPath, std::nullopt, t});
            return rec;
          }
        }
      }
      const sim::VelocityCommand cmd = follower.has_path() ? follower.step(est) : sim::VelocityCommand{};
      ++since_plan;

      sim::advance_obstacles(world.obstacles, cfg.dt);
      state = sim::step(world, state, cmd, cfg.dt, cfg.noise, rng, cfg.robot_radius);
      ++steps;
      t = static_cast<double>(steps) * cfg.dt;
      if (observer) observer({t, wp.index, state.truth, est, state.odom, cmd, state.collided});
    }
  }
  return rec;
}

}  // namespace wpnav::mission
