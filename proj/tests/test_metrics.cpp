#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wpnav/metrics.hpp"
#include "wpnav/textio.hpp"

using namespace wpnav;
using namespace wpnav::bench;
using mission::Status;

namespace {

RecordRow arrival(int trial, int wp, const Pose2D& goal, const Pose2D& truth) {
  RecordRow r;
  r.trial = trial;
  r.wp = wp;
  r.goal = goal;
  r.truth = truth;
  return r;
}

RecordRow failure(int trial, int wp, Status s) {
  RecordRow r;
  r.trial = trial;
  r.wp = wp;
  r.status = s;
  return r;
}

/// Point-in-convex-polygon (counter-clockwise), boundary included.
bool inside_or_on(const std::vector<Point2>& hull, Point2 p) {
  if (hull.size() == 1) return std::hypot(p.x - hull[0].x, p.y - hull[0].y) < 1e-12;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2 a = hull[i];
    const Point2 b = hull[(i + 1) % hull.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross < -1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("accuracy examples") {
  const Pose2D g{1.0, 2.0, 0.5};
  const std::vector<RecordRow> exact = {arrival(0, 1, g, g), arrival(1, 1, g, g)};
  const Accuracy a = accuracy(exact);
  CHECK(a.trans == 0.0);
  CHECK(a.rot == 0.0);

  const std::vector<RecordRow> two = {arrival(0, 1, g, {2.0, 2.0, 0.5}), arrival(1, 1, g, {1.0, 5.0, 0.5}),
                                      failure(2, 1, Status::FailedTimeout)};
  const Accuracy b = accuracy(two);
  CHECK(b.trans == 2.0);
  CHECK(b.arrivals == 2);

  const std::vector<RecordRow> none = {failure(0, 1, Status::FailedNoPath)};
  CHECK_THROWS_AS(accuracy(none), UndefinedResult);
  CHECK_THROWS_AS(accuracy(std::vector<RecordRow>{}), UndefinedResult);
}

TEST_CASE("accuracy and precision match flat recomputation") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto rows = test::random_records(seed, 40, 8);
    const auto [t, r] = test::oracle_accuracy(rows);
    const Accuracy a = accuracy(rows);
    CHECK(std::abs(a.trans - t) <= 1e-12);
    CHECK(std::abs(a.rot - r) <= 1e-12);

    const auto want = test::oracle_precision(rows);
    const PrecisionTable got = precision(rows);
    REQUIRE(got.rows.size() == want.size());
    for (const auto& p : got.rows) {
      const auto& o = want.at(p.wp);
      CHECK(p.arrivals == o.arrivals);
      CHECK(std::abs(p.trans_prec - o.trans) <= 1e-12);
      CHECK(std::abs(p.rot_prec - o.rot) <= 1e-12);
    }
  }
}

TEST_CASE("precision examples") {
  const Pose2D g{0.0, 0.0, 0.0};
  const PrecisionTable single = precision(std::vector<RecordRow>{arrival(0, 1, g, {0.3, -0.2, 0.1})});
  REQUIRE(single.rows.size() == 1);
  CHECK(single.rows[0].trans_prec == 0.0);
  CHECK(std::abs(single.rows[0].rot_prec) < 1e-15);

  const PrecisionTable sym =
      precision(std::vector<RecordRow>{arrival(0, 1, g, {1.5, 1.0, 0.0}), arrival(1, 1, g, {0.5, 1.0, 0.0})});
  CHECK(sym.rows[0].trans_prec == doctest::Approx(0.5).epsilon(1e-15));

  // Across the cut the arithmetic mean would be 0 and the spread pi - 0.1.
  const PrecisionTable cut = precision(
      std::vector<RecordRow>{arrival(0, 1, g, {0.0, 0.0, kPi - 0.1}), arrival(1, 1, g, {0.0, 0.0, -kPi + 0.1})});
  CHECK(cut.rows[0].rot_prec == doctest::Approx(0.1).epsilon(1e-12));
  const std::vector<double> yaws = {kPi - 0.1, -kPi + 0.1};
  CHECK(std::abs(std::abs(circular_mean(yaws)) - kPi) < 1e-12);
}

TEST_CASE("waypoints without arrivals are omitted and flagged") {
  const Pose2D g{0.0, 0.0, 0.0};
  const std::vector<RecordRow> rows = {arrival(0, 1, g, g), failure(0, 2, Status::FailedTimeout),
                                       arrival(1, 1, g, g), failure(1, 2, Status::FailedLocalization)};
  const PrecisionTable t = precision(rows);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].wp == 1);
  CHECK(t.omitted == std::vector<int>{2});
}

TEST_CASE("success rates") {
  // 200 trials: two fail before the first goal, 64 more stop before the last.
  std::vector<RecordRow> rows;
  const Pose2D g{0.0, 0.0, 0.0};
  for (int t = 0; t < 200; ++t) {
    if (t < 2) {
      rows.push_back(failure(t, 1, Status::FailedTimeout));
      continue;
    }
    rows.push_back(arrival(t, 1, g, g));
    for (int wp = 2; wp <= 15; ++wp) {
      if (t < 66 && wp == 9) {
        rows.push_back(failure(t, wp, Status::FailedNoPath));
        break;
      }
      rows.push_back(arrival(t, wp, g, g));
    }
  }
  const SuccessCounts s = success_rates(rows, 15);
  CHECK(s.first_goal == 198);
  CHECK(s.final_goal == 134);
  CHECK(s.m == 200);
  CHECK(s.first_rate() == doctest::Approx(0.99));
  CHECK(s.final_rate() == doctest::Approx(0.67));

  std::vector<RecordRow> all_fail;
  for (int t = 0; t < 7; ++t) all_fail.push_back(failure(t, 1, Status::FailedTimeout));
  const SuccessCounts f = success_rates(all_fail, 3);
  CHECK(f.first_goal == 0);
  CHECK(f.final_goal == 0);
  CHECK(f.m == 7);

  std::vector<RecordRow> all_ok;
  for (int t = 0; t < 5; ++t)
    for (int wp = 1; wp <= 3; ++wp) all_ok.push_back(arrival(t, wp, g, g));
  const SuccessCounts o = success_rates(all_ok, 3);
  CHECK(o.first_goal == 5);
  CHECK(o.final_goal == 5);
  CHECK(o.m == 5);
}

TEST_CASE("convex hull") {
  const auto sq = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}});
  REQUIRE(sq.size() == 4);
  for (const Point2 c : {Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}})
    CHECK(std::count(sq.begin(), sq.end(), c) == 1);
  double area2 = 0.0;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const Point2 a = sq[i], b = sq[(i + 1) % sq.size()];
    area2 += a.x * b.y - a.y * b.x;
  }
  CHECK(area2 == doctest::Approx(2.0));  // counter-clockwise

  const auto seg = convex_hull({{0, 0}, {2, 1}, {2, 1}});
  CHECK(seg.size() == 2);
  CHECK(convex_hull({{3, 4}}).size() == 1);
  CHECK(convex_hull({{3, 4}, {3, 4}}).size() == 1);
  CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}}).size() == 2);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<Point2> pts;
    for (int i = 0; i < 5 + k; ++i) pts.push_back({n(rng), n(rng)});
    const auto h = convex_hull(pts);
    for (const Point2 v : h) CHECK(std::count(pts.begin(), pts.end(), v) >= 1);
    for (const Point2 p : pts) CHECK(inside_or_on(h, p));
  }
}

TEST_CASE("records file round-trip") {
  auto rows = test::random_records(3, 10, 4);
  rows[0].kind = mission::LocalizerKind::GridSlam;
  rows[0].phase = 2;
  std::vector<RecordRow> q;
  for (const auto& r : rows) q.push_back(quantized(r));
  std::stringstream ss;
  write_records_csv(ss, q);
  const std::string text = ss.str();
  CHECK(text.rfind(kRecordHeader, 0) == 0);
  const auto back = read_records_csv(ss);
  REQUIRE(back.size() == q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(back[i].phase == q[i].phase);
    CHECK(back[i].kind == q[i].kind);
    CHECK(back[i].status == q[i].status);
    CHECK(back[i].goal == q[i].goal);
    CHECK(back[i].truth == q[i].truth);
    CHECK(back[i].sim_time == q[i].sim_time);
  }
  // Quantized rows print back to the same bytes.
  std::stringstream again;
  write_records_csv(again, back);
  CHECK(again.str() == text);
  const Accuracy a = accuracy(q);
  const Accuracy b = accuracy(back);
  CHECK(a.trans == b.trans);
  CHECK(a.rot == b.rot);

  std::istringstream bad_header("phase,localizer\n");
  CHECK_THROWS_AS(read_records_csv(bad_header), ParseError);
  std::istringstream bad_status(std::string(kRecordHeader) + "\n1,icp,0,1,1,LOST,0,0,0,,,,,,1.0\n");
  try {
    read_records_csv(bad_status);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("arrival offsets") {
  const Pose2D g{1.0, 1.0, 0.0};
  const std::vector<RecordRow> rows = {arrival(0, 1, g, {1.5, 0.5, 0.0}), failure(1, 1, Status::FailedTimeout),
                                       arrival(2, 2, g, g)};
  const auto off = arrival_offsets(rows, 1);
  REQUIRE(off.size() == 1);
  CHECK(off[0].x == doctest::Approx(0.5));
  CHECK(off[0].y == doctest::Approx(-0.5));
}
