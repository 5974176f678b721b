#include "wpnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "wpnav/textio.hpp"

namespace wpnav::bench {

std::vector<RecordRow> to_rows(const mission::SessionRecord& rec, int trial, const mission::WaypointList& wps) {
  std::vector<RecordRow> rows;
  for (const auto& e : rec.entries) {
    RecordRow r;
    r.phase = rec.phase;
    r.kind = rec.kind;
    r.trial = trial;
    r.seed = rec.seed;
    r.wp = e.index;
    r.status = e.status;
    r.goal = wps.at(static_cast<std::size_t>(e.index - 1)).pose();
    r.truth = e.truth;
    r.sim_time = e.sim_time;
    rows.push_back(r);
  }
  return rows;
}

void write_records_csv(std::ostream& out, std::span<const RecordRow> rows) {
  out << kRecordHeader << '\n';
  for (const auto& r : rows) {
    out << r.phase << ',' << mission::to_string(r.kind) << ',' << r.trial << ',' << r.seed << ',' << r.wp << ','
        << mission::to_string(r.status) << ',' << format_f6(r.goal.x) << ',' << format_f6(r.goal.y) << ','
        << format_f6(r.goal.yaw) << ',';
    if (r.truth) {
      const PoseError e = pose_error(*r.truth, r.goal);
      out << format_f6(r.truth->x) << ',' << format_f6(r.truth->y) << ',' << format_f6(r.truth->yaw) << ','
          << format_f6(e.trans) << ',' << format_f6(e.rot) << ',';
    } else {
      out << ",,,,,";
    }
    out << format_f6(r.sim_time) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double q6(double v) { return parse_double(format_f6(v), 0); }

}  // namespace

std::vector<RecordRow> read_records_csv(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty() || lines[0].text != kRecordHeader) throw ParseError(1, "unexpected record header");
  std::vector<RecordRow> rows;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& l = lines[k];
    if (l.tokens.empty()) continue;
    const auto f = split_csv(l.text);
    if (f.size() != 15) throw ParseError(l.number, "expected 15 fields");
    RecordRow r;
    r.phase = static_cast<int>(parse_int(f[0], l.number));
    const auto kind = mission::parse_kind(f[1]);
    if (!kind) throw ParseError(l.number, "unknown localizer '" + f[1] + "'");
    r.kind = *kind;
    r.trial = static_cast<int>(parse_int(f[2], l.number));
    r.seed = static_cast<std::uint64_t>(parse_int(f[3], l.number));
    r.wp = static_cast<int>(parse_int(f[4], l.number));
    const auto st = mission::parse_status(f[5]);
    if (!st) throw ParseError(l.number, "unknown status '" + f[5] + "'");
    r.status = *st;
    r.goal = {parse_double(f[6], l.number), parse_double(f[7], l.number), parse_double(f[8], l.number)};
    if (!f[9].empty()) {
      r.truth = Pose2D{parse_double(f[9], l.number), parse_double(f[10], l.number), parse_double(f[11], l.number)};
    }
    r.sim_time = parse_double(f[14], l.number);
    rows.push_back(r);
  }
  return rows;
}

RecordRow quantized(const RecordRow& row) {
  RecordRow r = row;
  r.goal = {q6(row.goal.x), q6(row.goal.y), q6(row.goal.yaw)};
  if (row.truth) r.truth = Pose2D{q6(row.truth->x), q6(row.truth->y), q6(row.truth->yaw)};
  r.sim_time = q6(row.sim_time);
  return r;
}

Accuracy accuracy(std::span<const RecordRow> rows) {
  Accuracy a;
  for (const auto& r : rows) {
    if (!r.arrived()) continue;
    const PoseError e = pose_error(*r.truth, r.goal);
    a.trans += e.trans;
    a.rot += e.rot;
    ++a.arrivals;
  }
  if (a.arrivals == 0) throw UndefinedResult("accuracy is undefined without arrivals");
  a.trans /= static_cast<double>(a.arrivals);
  a.rot /= static_cast<double>(a.arrivals);
  return a;
}

double circular_mean(std::span<const double> angles) {
  double s = 0.0;
  double c = 0.0;
  for (double a : angles) {
    s += std::sin(a);
    c += std::cos(a);
  }
  const double n = static_cast<double>(angles.size());
  return std::atan2(s / n, c / n);
}

PrecisionTable precision(std::span<const RecordRow> rows) {
  std::map<int, std::vector<const RecordRow*>> by_wp;
  for (const auto& r : rows) {
    auto& bucket = by_wp[r.wp];
    if (r.arrived()) bucket.push_back(&r);
  }
  PrecisionTable table;
  for (const auto& [wp, arrivals] : by_wp) {
    if (arrivals.empty()) {
      table.omitted.push_back(wp);
      continue;
    }
    const double n = static_cast<double>(arrivals.size());
    double mx = 0.0;
    double my = 0.0;
    std::vector<double> yaws;
    for (const auto* r : arrivals) {
      mx += r->truth->x;
      my += r->truth->y;
      yaws.push_back(r->truth->yaw);
    }
    mx /= n;
    my /= n;
    const double mean_yaw = circular_mean(yaws);
    WaypointPrecision p;
    p.wp = wp;
    p.arrivals = arrivals.size();
    for (const auto* r : arrivals) {
      p.trans_prec += std::hypot(r->truth->x - mx, r->truth->y - my);
      p.rot_prec += std::abs(wrap_angle(r->truth->yaw - mean_yaw));
    }
    p.trans_prec /= n;
    p.rot_prec /= n;
    table.rows.push_back(p);
  }
  return table;
}

SuccessCounts success_rates(std::span<const RecordRow> rows, int n_waypoints) {
  std::set<int> trials;
  std::set<int> first;
  std::set<int> final;
  for (const auto& r : rows) {
    trials.insert(r.trial);
    if (r.status != mission::Status::Reached) continue;
    if (r.wp == 1) first.insert(r.trial);
    if (r.wp == n_waypoints) final.insert(r.trial);
  }
  return {static_cast<int>(first.size()), static_cast<int>(final.size()), static_cast<int>(trials.size())};
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto turn = [](Point2 o, Point2 a, Point2 b) { return cross(a - o, b - o); };
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0.0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  if (hull.size() < 2) hull = {pts.front(), pts.back()};  // all collinear
  return hull;
}

std::vector<Point2> arrival_offsets(std::span<const RecordRow> rows, int wp) {
  std::vector<Point2> out;
  for (const auto& r : rows) {
    if (r.wp == wp && r.arrived()) out.push_back({r.truth->x - r.goal.x, r.truth->y - r.goal.y});
  }
  return out;
}

}  // namespace wpnav::bench
