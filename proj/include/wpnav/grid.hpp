#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "wpnav/geom.hpp"

namespace wpnav {

struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Axis-aligned grid layout. Row index grows with y, column index with x;
/// `origin` is the lower-left corner of cell (0, 0).
struct GridGeometry {
  int rows = 0;
  int cols = 0;
  double resolution = 0.1;
  Point2 origin;

  bool contains(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < rows && c.col < cols; }
  Cell cell_of(Point2 p) const {
    return {static_cast<int>(std::floor((p.y - origin.y) / resolution)),
            static_cast<int>(std::floor((p.x - origin.x) / resolution))};
  }
  Point2 center(Cell c) const {
    return {origin.x + (c.col + 0.5) * resolution, origin.y + (c.row + 0.5) * resolution};
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(c.col);
  }
  Cell cell_at(std::size_t i) const {
    return {static_cast<int>(i / static_cast<std::size_t>(cols)),
            static_cast<int>(i % static_cast<std::size_t>(cols))};
  }
  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

template <class T>
struct Grid {
  GridGeometry geometry;
  std::vector<T> data;

  Grid() = default;
  Grid(GridGeometry g, T fill) : geometry(g), data(g.size(), fill) {}

  T& at(Cell c) { return data[geometry.index(c)]; }
  const T& at(Cell c) const { return data[geometry.index(c)]; }
  bool contains(Cell c) const { return geometry.contains(c); }
};

/// Binary occupancy layer (1 = occupied) used as the static input of a costmap.
using OccupancyLayer = Grid<std::uint8_t>;

/// Walks the cells pierced by the ray `from + t * dir` for t in [0, max_t],
/// crossing cell boundaries exactly. `visit(cell, t_enter)` returns true to stop.
/// Cells outside the grid are still reported; callers decide how to treat them.
template <class Visit>
void traverse_ray(const GridGeometry& g, Point2 from, Point2 dir, double max_t, Visit&& visit) {
  const double gx = from.x - g.origin.x;
  const double gy = from.y - g.origin.y;
  const double res = g.resolution;
  int cx = static_cast<int>(std::floor(gx / res));
  int cy = static_cast<int>(std::floor(gy / res));
  const int step_x = dir.x > 0 ? 1 : (dir.x < 0 ? -1 : 0);
  const int step_y = dir.y > 0 ? 1 : (dir.y < 0 ? -1 : 0);
  constexpr double inf = HUGE_VAL;
  auto next_x = [&] {
    if (step_x == 0) return inf;
    return ((cx + (step_x > 0 ? 1 : 0)) * res - gx) / dir.x;
  };
  auto next_y = [&] {
    if (step_y == 0) return inf;
    return ((cy + (step_y > 0 ? 1 : 0)) * res - gy) / dir.y;
  };
  double t = 0.0;
  double tx = next_x();
  double ty = next_y();
  while (true) {
    if (visit(Cell{cy, cx}, t)) return;
    if (tx < ty) {
      t = tx;
      cx += step_x;
      tx = next_x();
    } else {
      t = ty;
      cy += step_y;
      ty = next_y();
    }
    if (t > max_t) return;
  }
}

}  // namespace wpnav
