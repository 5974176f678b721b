#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpnav/metrics.hpp"
#include "wpnav/mission.hpp"
#include "wpnav/refmap.hpp"
#include "wpnav/worldsim.hpp"

namespace wpnav::bench {

/// Terminal pose errors of completed phase-1 trials, each relative to the final waypoint.
struct ErrorSet {
  std::vector<Pose2D> errors;
  bool empty() const { return errors.empty(); }
};

void write_errset(std::ostream& out, const ErrorSet& set);
void save_errset(const ErrorSet& set, const std::string& path);
ErrorSet read_errset(std::istream& in);
ErrorSet load_errset(const std::string& path);

/// Collects goal⁻¹ ∘ truth at the final waypoint from every trial that reached it.
ErrorSet build_error_set(const std::vector<mission::SessionRecord>& trials, const mission::WaypointList& wps);

class MissingErrorSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform draw with replacement.
Pose2D sample_initial_error(const ErrorSet& set, sim::Rng& rng);

/// Everything a single trial reads. Shared read-only across workers.
struct TrialContext {
  const sim::World* world = nullptr;
  const mission::WaypointList* waypoints = nullptr;
  std::shared_ptr<const refmap::ReferenceMap> map;
  mission::MissionConfig mission;
};

/// Seed of the offset stream, kept apart from the mission's noise stream.
std::uint64_t offset_seed(std::uint64_t trial_seed);

mission::SessionRecord run_trial(int phase, mission::LocalizerKind kind, std::uint64_t seed,
                                 const TrialContext& ctx, const ErrorSet* errors = nullptr);

/// Runs trials base_seed + 0 .. base_seed + m - 1 across `workers` threads.
std::vector<mission::SessionRecord> run_phase(int phase, mission::LocalizerKind kind, std::uint64_t base_seed,
                                              int m, const TrialContext& ctx, const ErrorSet* errors,
                                              int workers);

/// Single-threaded reference for run_phase.
std::vector<mission::SessionRecord> run_phase_serial(int phase, mission::LocalizerKind kind,
                                                     std::uint64_t base_seed, int m, const TrialContext& ctx,
                                                     const ErrorSet* errors);

struct ExperimentConfig {
  std::filesystem::path world;
  std::filesystem::path waypoints;
  std::filesystem::path tape;    // drive used to build the reference map
  std::filesystem::path refmap;  // if set, loaded instead of building one
  std::filesystem::path out;     // report directory; empty keeps everything in memory
  int m = 25;
  std::vector<mission::LocalizerKind> kinds = {mission::LocalizerKind::PriorMap, mission::LocalizerKind::GridSlam};
  std::vector<int> phases = {1, 2};
  std::uint64_t seed = 1000;
  std::uint64_t map_seed = 7;
  double map_cell = 0.1;
  icp::IcpConfig map_icp;
  int workers = 1;
  mission::MissionConfig mission;
  std::map<mission::LocalizerKind, std::filesystem::path> errsets;  // phase-2 sources when phase 1 is skipped

  void validate() const;
};

/// Aggregates of one (phase, localizer) group.
struct GroupSummary {
  int phase = 1;
  mission::LocalizerKind kind = mission::LocalizerKind::PriorMap;
  std::optional<Accuracy> acc;  // empty when the group has no arrivals
  PrecisionTable prec;
  SuccessCounts success;
  std::map<int, std::vector<Point2>> hulls;  // per waypoint, over arrival offsets
};

struct ExperimentResult {
  int n_waypoints = 0;
  std::vector<RecordRow> rows;
  std::vector<GroupSummary> groups;
  std::size_t map_points = 0;

  const GroupSummary* group(int phase, mission::LocalizerKind kind) const;
};

/// Pure function of the rows: groups appear in (phase, kind) order.
std::vector<GroupSummary> summarize(const std::vector<RecordRow>& rows, int n_waypoints);

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// records.csv, aggregates.csv, precision.csv and plots/*.svg.
void write_report(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// Plain-text aggregate table.
void print_summary(std::ostream& out, const ExperimentResult& result);

std::string scatter_svg(const std::vector<Point2>& offsets, const std::vector<Point2>& hull, const std::string& title);

}  // namespace wpnav::bench
