#include "wpnav/icp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace wpnav::icp {

namespace {

constexpr std::size_t kLeafSize = 8;

double coord(Point2 p, int axis) { return axis == 0 ? p.x : p.y; }

bool better(double d2, std::size_t idx, double best_d2, std::size_t best) {
  return d2 < best_d2 || (d2 == best_d2 && idx < best);
}

}  // namespace

NNIndex::NNIndex(PointCloud2D points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("cannot index an empty point cloud");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  build(0, order_.size(), 0);
}

int NNIndex::build(std::size_t begin, std::size_t end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  double lo[2] = {HUGE_VAL, HUGE_VAL};
  double hi[2] = {-HUGE_VAL, -HUGE_VAL};
  for (std::size_t k = begin; k < end; ++k) {
    const Point2 p = points_[order_[k]];
    lo[0] = std::min(lo[0], p.x);
    hi[0] = std::max(hi[0], p.x);
    lo[1] = std::min(lo[1], p.y);
    hi[1] = std::max(hi[1], p.y);
  }
  const int axis = (hi[0] - lo[0]) >= (hi[1] - lo[1]) ? 0 : 1;
  if (hi[axis] == lo[axis]) return id;  // all coincident; keep as a leaf
  (void)depth;

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     return std::make_tuple(coord(points_[a], axis), a) <
                            std::make_tuple(coord(points_[b], axis), b);
                   });
  const double split = coord(points_[order_[mid]], axis);
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void NNIndex::search(int node_id, Point2 q, std::size_t& best, double& best_d2) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t idx = order_[k];
      const double d2 = squared_distance(points_[idx], q);
      if (better(d2, idx, best_d2, best)) {
        best = idx;
        best_d2 = d2;
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double diff = coord(q, node.axis) - node.split;
  const int near = diff <= 0.0 ? node.left : node.right;
  const int far = diff <= 0.0 ? node.right : node.left;
  search(near, q, best, best_d2);
  if (diff * diff <= best_d2) search(far, q, best, best_d2);
}

Neighbor NNIndex::nearest(Point2 q) const {
  std::size_t best = points_.size();
  double best_d2 = HUGE_VAL;
  search(0, q, best, best_d2);
  return {best, std::sqrt(best_d2)};
}

NNIndex build_index(PointCloud2D points) { return NNIndex(std::move(points)); }

Neighbor nearest_linear(std::span<const Point2> points, Point2 q) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  std::size_t best = 0;
  double best_d2 = squared_distance(points[0], q);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d2 = squared_distance(points[i], q);
    if (d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
  }
  return {best, std::sqrt(best_d2)};
}

Pose2D estimate_rigid(std::span<const PointPair> pairs) {
  if (pairs.size() < 2) throw DegenerateInput("rigid estimation needs at least two pairs");
  // Canonical order makes the floating-point sums independent of input order.
  std::vector<PointPair> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end(), [](const PointPair& a, const PointPair& b) {
    return std::tie(a.source.x, a.source.y, a.target.x, a.target.y) <
           std::tie(b.source.x, b.source.y, b.target.x, b.target.y);
  });
  const double n = static_cast<double>(sorted.size());
  Point2 sbar;
  Point2 tbar;
  for (const auto& p : sorted) {
    sbar = sbar + p.source;
    tbar = tbar + p.target;
  }
  sbar = (1.0 / n) * sbar;
  tbar = (1.0 / n) * tbar;
  double sxx = 0.0;
  double sum_cross = 0.0;
  double sum_dot = 0.0;
  for (const auto& p : sorted) {
    const Point2 s = p.source - sbar;
    const Point2 t = p.target - tbar;
    sxx += dot(s, s);
    sum_cross += cross(s, t);
    sum_dot += dot(s, t);
  }
  if (sxx <= 1e-18) throw DegenerateInput("all source points coincide");
  const double theta = std::atan2(sum_cross, sum_dot);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {tbar.x - (c * sbar.x - s * sbar.y), tbar.y - (s * sbar.x + c * sbar.y), wrap_angle(theta)};
}

void validate(const IcpConfig& cfg) {
  if (cfg.max_iterations <= 0 || cfg.max_corr_dist <= 0.0 || cfg.trans_eps <= 0.0 ||
      cfg.rot_eps <= 0.0 || cfg.min_inlier_frac <= 0.0 || cfg.min_inlier_frac > 1.0) {
    throw std::invalid_argument("invalid ICP configuration");
  }
}

IcpResult run_icp(std::span<const Point2> source, const NNIndex& target, const Pose2D& guess,
                  const IcpConfig& cfg) {
  if (source.empty()) throw std::invalid_argument("ICP source cloud is empty");
  IcpResult result;
  result.transform = guess;

  std::vector<PointPair> pairs;
  pairs.reserve(source.size());
  double sq_sum = 0.0;
  auto gather = [&](const Pose2D& T) {
    pairs.clear();
    sq_sum = 0.0;
    for (const Point2 s : source) {
      const Point2 p = transform_point(T, s);
      const Neighbor nb = target.nearest(p);
      if (nb.distance <= cfg.max_corr_dist) {
        pairs.push_back({p, target.points()[nb.index]});
        sq_sum += nb.distance * nb.distance;
      }
    }
  };

  bool settled = false;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    gather(result.transform);
    result.rmse_history.push_back(pairs.empty() ? 0.0 : std::sqrt(sq_sum / pairs.size()));
    Pose2D delta;
    try {
      delta = estimate_rigid(pairs);
    } catch (const DegenerateInput&) {
      break;
    }
    result.transform = compose(delta, result.transform);
    result.iterations = it + 1;
    if (std::hypot(delta.x, delta.y) < cfg.trans_eps && std::abs(delta.yaw) < cfg.rot_eps) {
      settled = true;
      break;
    }
  }

  gather(result.transform);
  result.inlier_count = pairs.size();
  result.rmse = pairs.empty() ? 0.0 : std::sqrt(sq_sum / pairs.size());
  const double frac = static_cast<double>(pairs.size()) / static_cast<double>(source.size());
  result.converged = settled && frac >= cfg.min_inlier_frac;
  return result;
}

}  // namespace wpnav::icp
