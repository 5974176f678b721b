#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "wpnav/nav.hpp"

using namespace wpnav;
using namespace wpnav::nav;

namespace {

OccupancyLayer empty_layer(int rows, int cols, double res = 0.1) {
  return OccupancyLayer(GridGeometry{rows, cols, res, {0.0, 0.0}}, 0);
}

const Pose2D kFarAway{-100.0, -100.0, 0.0};

Costmap costmap_of(const OccupancyLayer& layer, const CostmapParams& p = {}) {
  return build_costmap(layer, std::vector<Point2>{}, kFarAway, p);
}

}  // namespace

TEST_CASE("empty costmap is free") {
  const Costmap m = costmap_of(empty_layer(10, 12));
  for (auto v : m.cost) CHECK(v == kFree);
}

TEST_CASE("zero inflation marks only the lethal cell") {
  OccupancyLayer layer = empty_layer(11, 11);
  layer.at({5, 5}) = 1;
  CostmapParams p;
  p.inflation_radius = 0.0;
  const Costmap m = costmap_of(layer, p);
  for (std::size_t i = 0; i < m.cost.size(); ++i) {
    if (layer.geometry.cell_at(i) == Cell{5, 5}) {
      CHECK(m.cost[i] == kLethal);
    } else {
      CHECK(m.cost[i] == kFree);
    }
  }
}

TEST_CASE("inflation follows the exact Euclidean distance") {
  OccupancyLayer layer = empty_layer(21, 21);
  layer.at({10, 10}) = 1;
  CostmapParams p;
  p.inflation_radius = 0.5;
  const Costmap m = costmap_of(layer, p);
  for (std::size_t i = 0; i < m.cost.size(); ++i) {
    const Cell c = layer.geometry.cell_at(i);
    const double d = std::hypot(c.row - 10, c.col - 10);  // in cells
    if (d == 0.0) {
      CHECK(m.cost[i] == kLethal);
    } else if (d * 0.1 <= 0.3) {  // same rounding as the costmap: 3 cells is just outside
      CHECK(m.cost[i] == kInscribed);
    } else if (d * 0.1 <= 0.5) {
      CHECK(m.cost[i] >= 1);
      const double expect = 252.0 * std::exp(-3.0 * (d * 0.1 - 0.2));
      CHECK(m.cost[i] == std::max<long>(1, std::lround(expect)));
    } else {
      CHECK(m.cost[i] == kFree);
    }
  }
}

TEST_CASE("distance transform matches brute force") {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution seed_cell(0.03);
  const GridGeometry g{23, 31, 0.1, {0.0, 0.0}};
  std::vector<std::uint8_t> seeds(g.size());
  for (auto& s : seeds) s = seed_cell(rng) ? 1 : 0;
  seeds[0] = 1;
  const auto d2 = squared_distance_transform(g, seeds);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Cell a = g.cell_at(i);
    double best = HUGE_VAL;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (!seeds[j]) continue;
      const Cell b = g.cell_at(j);
      best = std::min(best, static_cast<double>((a.row - b.row) * (a.row - b.row) + (a.col - b.col) * (a.col - b.col)));
    }
    CHECK(d2[i] == best);
  }
}

TEST_CASE("scan endpoints become lethal and the robot cell is cleared") {
  const OccupancyLayer layer = empty_layer(40, 40);
  const std::vector<Point2> pts = {{1.05, 1.05}, {3.05, 2.05}};
  const Costmap m = build_costmap(layer, pts, {2.0, 2.0, 0.0});
  CHECK(m.at({10, 10}) == kLethal);
  CHECK(m.at({20, 30}) == kLethal);
  CHECK_FALSE(m.cleared_robot_cell);

  const Costmap on_robot = build_costmap(layer, std::vector<Point2>{{2.05, 2.05}}, {2.05, 2.05, 0.0});
  CHECK(on_robot.cleared_robot_cell);
  CHECK(on_robot.at({20, 20}) != kLethal);
}

TEST_CASE("plan trivial cases") {
  const Costmap free5 = costmap_of(empty_layer(5, 5));
  const PlanResult same = plan(free5, {0.25, 0.25, 0}, {0.21, 0.29, 1.0});
  REQUIRE(same.ok());
  CHECK(same.path.points.size() == 1);
  CHECK(same.path.cost == 0.0);

  const PlanResult diag = plan(free5, {0.05, 0.05, 0}, {0.45, 0.45, 0});
  REQUIRE(diag.ok());
  CHECK(diag.path.cost == doctest::Approx(4.0 * std::sqrt(2.0)));
  CHECK(diag.path.points.size() == 2);  // collinear interior cells removed
  CHECK(diag.path.points.back() == Point2{0.45, 0.45});

  OccupancyLayer walled = empty_layer(20, 20);
  for (int r = 0; r < 20; ++r) walled.at({r, 10}) = 1;
  const Costmap wm = costmap_of(walled);
  CHECK(plan(wm, {0.05, 0.05, 0}, {1.95, 0.05, 0}).status == PlanStatus::Unreachable);
  CHECK(plan(wm, {0.05, 0.05, 0}, {1.05, 0.05, 0}).status == PlanStatus::GoalBlocked);
  CHECK(plan(wm, {0.05, 0.05, 0}, {5.0, 0.05, 0}).status == PlanStatus::GoalOutside);
  CHECK(plan(wm, {-1.0, 0.05, 0}, {0.5, 0.05, 0}).status == PlanStatus::StartOutside);
  CHECK(plan(wm, {1.05, 0.05, 0}, {0.5, 0.05, 0}).status == PlanStatus::StartBlocked);
}

TEST_CASE("diagonal moves never cut a blocked corner") {
  OccupancyLayer layer = empty_layer(3, 3);
  layer.at({1, 0}) = 1;
  layer.at({0, 1}) = 1;
  CostmapParams p;
  p.inflation_radius = 0.0;
  const Costmap m = costmap_of(layer, p);
  CHECK(plan(m, {0.05, 0.05, 0}, {0.15, 0.15, 0}).status == PlanStatus::Unreachable);
}

TEST_CASE("plan cost equals a brute-force oracle on random grids") {
  std::mt19937_64 rng(2024);
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Costmap m = test::random_costmap(seed);
    const GridGeometry& g = m.geometry;
    std::uniform_int_distribution<int> pick(0, 19);
    Cell s{-1, -1}, t{-1, -1};
    for (int k = 0; k < 1000 && (s.row < 0 || m.at(s) >= kInscribed); ++k) s = {pick(rng), pick(rng)};
    for (int k = 0; k < 1000 && (t.row < 0 || m.at(t) == kLethal); ++k) t = {pick(rng), pick(rng)};
    REQUIRE(m.at(s) < kInscribed);
    const PlanResult r = plan(m, {g.center(s).x, g.center(s).y, 0}, {g.center(t).x, g.center(t).y, 0});
    const double oracle = test::oracle_path_cost(m, s, t, PlannerOptions{}.escape_radius);
    if (std::isinf(oracle)) {
      CHECK_FALSE(r.ok());
      continue;
    }
    REQUIRE(r.ok());
    CHECK(std::abs(r.path.cost - oracle) < 1e-9);
    CHECK_FALSE(path_blocked(m, r.path, 0));
    ++compared;
  }
  CHECK(compared > 25);
}

TEST_CASE("path_blocked sees a new lethal cell on the path") {
  const Costmap free_map = costmap_of(empty_layer(10, 30));
  const PlanResult r = plan(free_map, {0.05, 0.55, 0}, {2.85, 0.55, 0});
  REQUIRE(r.ok());
  CHECK_FALSE(path_blocked(free_map, r.path, 0));
  OccupancyLayer layer = empty_layer(10, 30);
  layer.at({5, 15}) = 1;
  CHECK(path_blocked(costmap_of(layer), r.path, 0));
}

TEST_CASE("control_step") {
  Path path;
  path.points = {{0, 0}, {5, 0}};
  path.goal = {5, 0, 0};
  ControlLimits lim;
  const auto cruise = control_step({1.0, 0.0, 0.0}, path, lim);
  CHECK(cruise.v == doctest::Approx(lim.v_max));
  CHECK(std::abs(cruise.omega) < 1e-9);

  const auto turn = control_step({1.0, 0.0, kPi}, path, lim);
  CHECK(turn.v == 0.0);
  CHECK(std::abs(turn.omega) == lim.w_max);

  // at the goal position only the yaw is corrected
  path.goal = {5, 0, 1.0};
  const auto align = control_step({5.0, 0.0, 0.0}, path, lim);
  CHECK(align.v == 0.0);
  CHECK(align.omega == doctest::Approx(1.0));
  CHECK_THROWS(control_step({0, 0, 0}, Path{}, lim));
}

TEST_CASE("closed loop reaches a goal 3 m ahead") {
  const sim::World room = test::square_room(10.0, 0.5);
  const OccupancyLayer layer(GridGeometry{200, 200, 0.1, {-10.0, -10.0}}, 0);
  const Pose2D goal{3.0, 0.0, 0.0};
  const GoalTolerance tol;
  PathFollower follower;
  sim::RobotState s;
  sim::Rng rng(1);
  const PlanResult r = plan(costmap_of(layer), s.truth, goal);
  REQUIRE(r.ok());
  follower.set_path(r.path);
  int steps = 0;
  std::size_t last_progress = 0;
  while (!goal_reached(s.truth, goal, tol) && steps < 200) {
    s = sim::step(room, s, follower.step(s.truth), 0.1, sim::MotionNoise::zero(), rng, 0.2);
    CHECK(follower.progress() >= last_progress);
    last_progress = follower.progress();
    ++steps;
  }
  CHECK(steps < 200);
}

TEST_CASE("goal_reached is closed at the tolerance") {
  const GoalTolerance tol{0.25, 0.05};
  CHECK(goal_reached({1, 2, 0.3}, {1, 2, 0.3}, tol));
  CHECK(goal_reached({0.25, 0.0, 0.0}, {0.0, 0.0, 0.0}, tol));
  CHECK_FALSE(goal_reached({0.0, 0.0, 0.0501}, {0.0, 0.0, 0.0}, tol));
  CHECK_FALSE(goal_reached({0.2501, 0.0, 0.0}, {0.0, 0.0, 0.0}, tol));
  CHECK(goal_reached({0, 0, kPi - 0.01}, {0, 0, -kPi + 0.01}, tol));
}
