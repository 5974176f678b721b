#include <doctest.h>

#include <random>

#include "wpnav/geom.hpp"

using namespace wpnav;

namespace {

Pose2D random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  return Pose2D::make(pos(rng), pos(rng), ang(rng));
}

void check_pose(const Pose2D& a, const Pose2D& b, double tol) {
  CHECK(std::abs(a.x - b.x) <= tol);
  CHECK(std::abs(a.y - b.y) <= tol);
  CHECK(std::abs(wrap_angle(a.yaw - b.yaw)) <= tol);
}

}  // namespace

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == kPi);
  CHECK(wrap_angle(kPi) == kPi);
  CHECK(wrap_angle(2 * kPi) == doctest::Approx(0.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = d(rng);
    const double w = wrap_angle(t);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(wrap_angle(w) == w);
    CHECK(std::abs(std::remainder(t - w, 2 * kPi)) < 1e-9);
  }
}

TEST_CASE("compose") {
  const Pose2D p{1.5, -2.0, 0.3};
  check_pose(compose(Pose2D::identity(), p), p, 0.0);
  check_pose(compose(p, Pose2D::identity()), p, 0.0);
  check_pose(compose({1, 0, kPi / 2}, {1, 0, 0}), {1, 1, kPi / 2}, 1e-15);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Pose2D a = random_pose(rng);
    check_pose(compose(a, inverse(a)), Pose2D::identity(), 1e-12);
    check_pose(compose(inverse(a), a), Pose2D::identity(), 1e-12);
    const Pose2D b = random_pose(rng);
    const Pose2D c = random_pose(rng);
    check_pose(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-12);
  }
}

TEST_CASE("compose keeps yaw canonical") {
  const Pose2D r = compose({0, 0, kPi - 0.1}, {0, 0, 0.2});
  CHECK(r.yaw == doctest::Approx(-kPi + 0.1));
  CHECK(compose({0, 0, kPi / 2}, {0, 0, kPi / 2}).yaw == kPi);
}

TEST_CASE("inverse") {
  check_pose(inverse(Pose2D::identity()), Pose2D::identity(), 0.0);
  check_pose(inverse({1, 1, kPi / 2}), {-1, 1, -kPi / 2}, 1e-15);
}

TEST_CASE("relative is inverse(from) composed with to") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const Pose2D a = random_pose(rng);
    const Pose2D b = random_pose(rng);
    check_pose(compose(a, relative(a, b)), b, 1e-12);
  }
}

TEST_CASE("transform_point") {
  const Point2 p = transform_point({0, 0, 0}, {3, 4});
  CHECK(p.x == 3.0);
  CHECK(p.y == 4.0);
  const Point2 q = transform_point({0, 0, kPi}, {1, 0});
  CHECK(q.x == doctest::Approx(-1.0));
  CHECK(std::abs(q.y) < 1e-15);

  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Pose2D a = random_pose(rng);
    const Pose2D b = random_pose(rng);
    const Point2 x{1.25, -0.5};
    const Point2 lhs = transform_point(compose(a, b), x);
    const Point2 rhs = transform_point(a, transform_point(b, x));
    CHECK(std::abs(lhs.x - rhs.x) < 1e-12);
    CHECK(std::abs(lhs.y - rhs.y) < 1e-12);
  }
}

TEST_CASE("pose_error") {
  const PoseError zero = pose_error({1, 2, 0.5}, {1, 2, 0.5});
  CHECK(zero.trans == 0.0);
  CHECK(zero.rot == 0.0);

  const PoseError cut = pose_error({0, 3, kPi - 0.02}, {0, 0, -kPi + 0.02});
  CHECK(cut.trans == doctest::Approx(3.0));
  CHECK(cut.rot == doctest::Approx(0.04));

  const PoseError tri = pose_error({1, 1, 0}, {4, 5, 0});
  CHECK(tri.trans == doctest::Approx(5.0));
  CHECK(tri.rot == 0.0);

  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const Pose2D a = random_pose(rng);
    const Pose2D b = random_pose(rng);
    const PoseError ab = pose_error(a, b);
    const PoseError ba = pose_error(b, a);
    CHECK(ab.trans == ba.trans);
    CHECK(ab.rot == doctest::Approx(ba.rot));
    CHECK(ab.rot >= 0.0);
    CHECK(ab.rot <= kPi);
  }
}
