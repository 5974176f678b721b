// Serial reference versus OpenMP trial runner, and k-d tree versus linear nearest neighbour.

#include <chrono>
#include <cstdio>
#include <memory>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "wpnav/experiment.hpp"
#include "wpnav/icp.hpp"
#include "wpnav/refmap.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace wpnav;
using Clock = std::chrono::steady_clock;

namespace {

std::string data(const char* name) { return std::string(WPNAV_DATA_DIR) + "/" + name; }

template <class F>
double timed(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool same(const std::vector<mission::SessionRecord>& a, const std::vector<mission::SessionRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].entries.size() != b[i].entries.size()) return false;
    for (std::size_t k = 0; k < a[i].entries.size(); ++k) {
      const auto& x = a[i].entries[k];
      const auto& y = b[i].entries[k];
      if (x.status != y.status || x.truth != y.truth || x.sim_time != y.sim_time) return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wpnav kernels: serial reference against the parallel path"};
  int trials = 4;
  int workers = 0;
  int queries = 200000;
  app.add_option("--trials", trials, "Trials per phase run")->check(CLI::PositiveNumber);
  app.add_option("--workers", workers, "Threads for the parallel run (0: all available)");
  app.add_option("--queries", queries, "Nearest-neighbour queries")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
#ifdef _OPENMP
  if (workers <= 0) workers = omp_get_max_threads();
#else
  if (workers <= 0) workers = 1;
#endif

  const sim::World world = sim::load_world(data("desk.world"));
  const auto log = refmap::record_drive(world, refmap::load_tape(data("desk.tape")), {}, sim::MotionNoise{}, 7);
  std::shared_ptr<const refmap::ReferenceMap> map;
  const double t_map = timed([&] { map = std::make_shared<refmap::ReferenceMap>(refmap::accumulate(log, {}, 0.1)); });
  std::printf("reference map: %zu points from %zu frames in %.2f s\n\n", map->points.size(), log.size(), t_map);

  // Nearest neighbour.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-2.0, 23.5), uy(-2.0, 13.5);
  std::vector<Point2> qs(static_cast<std::size_t>(queries));
  for (auto& q : qs) q = {ux(rng), uy(rng)};
  std::size_t sum_tree = 0, sum_lin = 0, disagree = 0;
  std::vector<std::size_t> tree_idx(qs.size());
  const double t_tree = timed([&] {
    for (std::size_t i = 0; i < qs.size(); ++i) sum_tree += tree_idx[i] = map->index->nearest(qs[i]).index;
  });
  const std::size_t lin_n = std::min<std::size_t>(qs.size(), 20000);
  const double t_lin = timed([&] {
    for (std::size_t i = 0; i < lin_n; ++i) {
      const std::size_t j = icp::nearest_linear(map->points, qs[i]).index;
      sum_lin += j;
      disagree += j != tree_idx[i];
    }
  });
  std::printf("nearest neighbour (%zu map points)\n", map->points.size());
  std::printf("  k-d tree  %8zu queries  %9.3f us/query\n", qs.size(), 1e6 * t_tree / qs.size());
  std::printf("  linear    %8zu queries  %9.3f us/query  (%zu disagreements)\n\n", lin_n, 1e6 * t_lin / lin_n,
              disagree);

  // Trial runner.
  const mission::WaypointList wps = {{4.0, 0.0, kPi / 2, 1}, {10.75, 2.0, kPi / 2, 2}, {0.0, 0.0, 0.0, 3}};
  bench::TrialContext ctx{&world, &wps, map, mission::MissionConfig{}};
  std::printf("run_phase, %d trials of %zu waypoints\n", trials, wps.size());
  for (auto kind : {mission::LocalizerKind::PriorMap, mission::LocalizerKind::GridSlam}) {
    std::vector<mission::SessionRecord> serial, parallel;
    const double ts = timed([&] { serial = bench::run_phase_serial(1, kind, 1000, trials, ctx, nullptr); });
    const double tp = timed([&] { parallel = bench::run_phase(1, kind, 1000, trials, ctx, nullptr, workers); });
    std::printf("  %-9s serial %7.2f s   %d workers %7.2f s   speedup %.2fx   records %s\n",
                mission::to_string(kind), ts, workers, tp, ts / tp, same(serial, parallel) ? "identical" : "DIFFER");
  }
  (void)sum_lin;
  return 0;
}
