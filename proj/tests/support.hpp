#pragma once

#include <functional>
#include <memory>
#include <string>

#include "wpnav/refmap.hpp"
#include "wpnav/worldsim.hpp"

namespace wpnav::test {

/// World whose grid spans [x0, x0 + cols*res) x [y0, y0 + rows*res). A cell is free
/// when `is_free` holds at its centre and it is not on the border.
inline sim::World make_world(int rows, int cols, double res, Point2 origin,
                             const std::function<bool(Point2)>& is_free) {
  sim::World w;
  w.map.rows = rows;
  w.map.cols = cols;
  w.map.resolution = res;
  w.map.origin = {origin.x, origin.y, 0.0};
  w.map.cells.assign(static_cast<std::size_t>(rows) * cols, 1);
  for (int r = 1; r + 1 < rows; ++r) {
    for (int c = 1; c + 1 < cols; ++c) {
      const Point2 p{origin.x + (c + 0.5) * res, origin.y + (r + 0.5) * res};
      if (is_free(p)) w.map.cells[static_cast<std::size_t>(r) * cols + c] = 0;
    }
  }
  return w;
}

/// Square room with free interior [-half, half]^2 and one-cell walls.
inline sim::World square_room(double half, double res) {
  const int n = static_cast<int>(std::lround(2.0 * half / res)) + 2;
  return make_world(n, n, res, {-half - res, -half - res}, [](Point2) { return true; });
}

inline std::string data_path(const std::string& name) { return std::string(WPNAV_DATA_DIR) + "/" + name; }

inline const sim::World& desk_world() {
  static const sim::World w = sim::load_world(data_path("desk.world"));
  return w;
}

/// Reference map of the desk fixture built from its tape with default noise, as the
/// experiment does. Built once per test binary.
inline std::shared_ptr<const refmap::ReferenceMap> desk_map() {
  static const auto m = std::make_shared<const refmap::ReferenceMap>(refmap::accumulate(
      refmap::record_drive(desk_world(), refmap::load_tape(data_path("desk.tape")), {}, sim::MotionNoise{}, 7), {},
      0.1));
  return m;
}

/// Desk map assembled from zero-noise scans at their true poses, so it carries none
/// of the registration drift of an accumulated map. Isolates localizer behaviour.
inline std::shared_ptr<const refmap::ReferenceMap> surveyed_desk_map() {
  static const auto m = [] {
    const auto log = refmap::record_drive(desk_world(), refmap::load_tape(data_path("desk.tape")), {},
                                          sim::MotionNoise::zero(), 7);
    refmap::VoxelFilter f(0.1);
    for (const auto& e : log)
      for (const Point2 h : e.scan.hit_points()) f.insert(transform_point(e.odom, h));
    return std::make_shared<const refmap::ReferenceMap>(refmap::make_reference_map(f.points(), 0.1, 0.1));
  }();
  return m;
}

}  // namespace wpnav::test
