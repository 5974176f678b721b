#pragma once

#include <cmath>
#include <numbers>

namespace wpnav {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi]. The closed end is +pi.
double wrap_angle(double theta);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double squared_distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// SE(2) element. Used as a pose, an odometry increment and a rigid transform.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  static Pose2D identity() { return {}; }
  /// Builds a pose with the yaw wrapped into the canonical interval.
  static Pose2D make(double x, double y, double yaw) { return {x, y, wrap_angle(yaw)}; }

  Point2 position() const { return {x, y}; }

  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

struct PoseError {
  double trans = 0.0;
  double rot = 0.0;
};

/// a ⊕ b: applies b expressed in the frame of a.
Pose2D compose(const Pose2D& a, const Pose2D& b);
Pose2D inverse(const Pose2D& a);
/// inverse(from) ⊕ to, the pose of `to` seen from `from`.
Pose2D relative(const Pose2D& from, const Pose2D& to);
Point2 transform_point(const Pose2D& pose, Point2 p);
PoseError pose_error(const Pose2D& actual, const Pose2D& target);

inline Pose2D operator*(const Pose2D& a, const Pose2D& b) { return compose(a, b); }

bool is_finite(const Pose2D& p);

}  // namespace wpnav
