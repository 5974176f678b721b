#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "wpnav/geom.hpp"

namespace wpnav::icp {

using PointCloud2D = std::vector<Point2>;

class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Exact nearest-neighbour index (static 2-d tree). Immutable after construction
/// and safe to query from many threads. Ties go to the lowest point index.
class NNIndex {
 public:
  explicit NNIndex(PointCloud2D points);

  Neighbor nearest(Point2 q) const;
  const PointCloud2D& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    int axis;  // -1 for leaves
    double split;
    int left;
    int right;
  };

  int build(std::size_t begin, std::size_t end, int depth);
  void search(int node, Point2 q, std::size_t& best, double& best_d2) const;

  PointCloud2D points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

NNIndex build_index(PointCloud2D points);

/// Reference implementation used to check the tree.
Neighbor nearest_linear(std::span<const Point2> points, Point2 q);

struct PointPair {
  Point2 source;
  Point2 target;
};

/// Least-squares SE(2) transform mapping sources onto targets. The result does
/// not depend on the order of `pairs`.
Pose2D estimate_rigid(std::span<const PointPair> pairs);

struct IcpConfig {
  int max_iterations = 30;
  double max_corr_dist = 0.5;
  double trans_eps = 1e-4;
  double rot_eps = 1e-4;
  double min_inlier_frac = 0.25;
};

void validate(const IcpConfig& cfg);

struct IcpResult {
  Pose2D transform;  // source -> target
  int iterations = 0;
  std::size_t inlier_count = 0;
  double rmse = 0.0;
  bool converged = false;
  /// RMSE of the gated pairs at the start of each iteration.
  std::vector<double> rmse_history;
};

IcpResult run_icp(std::span<const Point2> source, const NNIndex& target, const Pose2D& guess,
                  const IcpConfig& cfg = {});

}  // namespace wpnav::icp
