#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wpnav/geom.hpp"
#include "wpnav/mission.hpp"

namespace wpnav::bench {

/// One line of the raw record table: the outcome of one waypoint in one trial.
struct RecordRow {
  int phase = 1;
  mission::LocalizerKind kind = mission::LocalizerKind::PriorMap;
  int trial = 0;
  std::uint64_t seed = 0;
  int wp = 0;
  mission::Status status = mission::Status::Reached;
  Pose2D goal;
  std::optional<Pose2D> truth;
  double sim_time = 0.0;

  bool arrived() const { return status == mission::Status::Reached && truth.has_value(); }
};

std::vector<RecordRow> to_rows(const mission::SessionRecord& rec, int trial, const mission::WaypointList& wps);

inline constexpr const char* kRecordHeader =
    "phase,localizer,trial,seed,wp,status,goal_x,goal_y,goal_yaw,truth_x,truth_y,truth_yaw,err_trans,err_rot,"
    "sim_time";

void write_records_csv(std::ostream& out, std::span<const RecordRow> rows);
std::vector<RecordRow> read_records_csv(std::istream& in);
/// Rounds every stored value to what the 6-decimal record file holds.
RecordRow quantized(const RecordRow& row);

class UndefinedResult : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Accuracy {
  double trans = 0.0;
  double rot = 0.0;
  std::size_t arrivals = 0;
};

/// Mean translational and rotational arrival error over every recorded arrival.
/// Throws UndefinedResult when there are none.
Accuracy accuracy(std::span<const RecordRow> rows);

struct WaypointPrecision {
  int wp = 0;
  std::size_t arrivals = 0;
  double trans_prec = 0.0;
  double rot_prec = 0.0;
};

struct PrecisionTable {
  std::vector<WaypointPrecision> rows;  // ordered by waypoint index
  std::vector<int> omitted;             // waypoints present in the records with no arrival
};

/// Per-waypoint dispersion about the arrival centroid (translation) and the
/// circular-mean yaw (rotation).
PrecisionTable precision(std::span<const RecordRow> rows);

/// atan2 of the mean sine over the mean cosine.
double circular_mean(std::span<const double> angles);

struct SuccessCounts {
  int first_goal = 0;
  int final_goal = 0;
  int m = 0;

  double first_rate() const { return m ? static_cast<double>(first_goal) / m : 0.0; }
  double final_rate() const { return m ? static_cast<double>(final_goal) / m : 0.0; }
};

/// Trials that reached waypoint 1 and waypoint `n_waypoints`; m counts distinct trials.
SuccessCounts success_rates(std::span<const RecordRow> rows, int n_waypoints);

/// Counter-clockwise hull (monotone chain) without collinear points. One or two
/// distinct inputs give a point or a segment.
std::vector<Point2> convex_hull(std::vector<Point2> points);

/// Arrival errors (truth minus goal) of one waypoint, in metres.
std::vector<Point2> arrival_offsets(std::span<const RecordRow> rows, int wp);

}  // namespace wpnav::bench
