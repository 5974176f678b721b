#include "wpnav/geom.hpp"

namespace wpnav {

double wrap_angle(double theta) {
  // std::remainder is exact, so congruence mod 2*pi is preserved bit for bit.
  double r = std::remainder(theta, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Pose2D compose(const Pose2D& a, const Pose2D& b) {
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, wrap_angle(a.yaw + b.yaw)};
}

Pose2D inverse(const Pose2D& a) {
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  return {-(c * a.x + s * a.y), s * a.x - c * a.y, wrap_angle(-a.yaw)};
}

Pose2D relative(const Pose2D& from, const Pose2D& to) { return compose(inverse(from), to); }

Point2 transform_point(const Pose2D& pose, Point2 p) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  return {pose.x + c * p.x - s * p.y, pose.y + s * p.x + c * p.y};
}

PoseError pose_error(const Pose2D& actual, const Pose2D& target) {
  return {std::hypot(actual.x - target.x, actual.y - target.y),
          std::abs(wrap_angle(actual.yaw - target.yaw))};
}

bool is_finite(const Pose2D& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.yaw);
}

}  // namespace wpnav
