#include "wpnav/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wpnav/textio.hpp"

namespace wpnav::bench {

namespace fs = std::filesystem;
using mission::LocalizerKind;
using mission::SessionRecord;

void write_errset(std::ostream& out, const ErrorSet& set) {
  out << "ERRSET 1\n";
  out << "count " << set.errors.size() << '\n';
  for (const auto& e : set.errors) out << format_g9(e.x) << ' ' << format_g9(e.y) << ' ' << format_g9(e.yaw) << '\n';
}

void save_errset(const ErrorSet& set, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_errset(f, set);
  if (!f) throw std::runtime_error("write failed: " + path);
}

ErrorSet read_errset(std::istream& in) {
  const auto lines = read_lines(in);
  std::size_t k = 0;
  auto next = [&]() -> const TextLine* {
    while (k < lines.size() && (lines[k].tokens.empty() || lines[k].tokens[0].starts_with('#'))) ++k;
    return k < lines.size() ? &lines[k++] : nullptr;
  };
  const TextLine* head = next();
  if (!head) throw ParseError(1, "empty error-set file");
  expect_header(*head, "ERRSET", 1);
  const TextLine* cl = next();
  if (!cl || cl->tokens.size() != 2 || cl->tokens[0] != "count") {
    throw ParseError(cl ? cl->number : head->number, "expected 'count N'");
  }
  const long long count = parse_int(cl->tokens[1], cl->number);
  if (count < 0) throw ParseError(cl->number, "negative count");
  ErrorSet set;
  while (const TextLine* l = next()) {
    if (l->tokens.size() != 3) throw ParseError(l->number, "expected 'ex ey eyaw'");
    set.errors.push_back({parse_double(l->tokens[0], l->number), parse_double(l->tokens[1], l->number),
                          parse_double(l->tokens[2], l->number)});
  }
  if (static_cast<long long>(set.errors.size()) != count) {
    throw ParseError(cl->number, "count says " + std::to_string(count) + " but file holds " +
                                     std::to_string(set.errors.size()));
  }
  return set;
}

ErrorSet load_errset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingErrorSet("no error set at " + path + "; run phase 1 first");
  return read_errset(f);
}

ErrorSet build_error_set(const std::vector<SessionRecord>& trials, const mission::WaypointList& wps) {
  ErrorSet set;
  if (wps.empty()) return set;
  const int n = static_cast<int>(wps.size());
  const Pose2D goal = wps.back().pose();
  for (const auto& rec : trials) {
    for (const auto& e : rec.entries) {
      if (e.index == n && e.status == mission::Status::Reached && e.truth) set.errors.push_back(relative(goal, *e.truth));
    }
  }
  return set;
}

Pose2D sample_initial_error(const ErrorSet& set, sim::Rng& rng) {
  if (set.empty()) throw MissingErrorSet("error set is empty; run phase 1 first");
  std::uniform_int_distribution<std::size_t> pick(0, set.errors.size() - 1);
  return set.errors[pick(rng)];
}

std::uint64_t offset_seed(std::uint64_t trial_seed) { return trial_seed ^ 0x9e3779b97f4a7c15ULL; }

SessionRecord run_trial(int phase, LocalizerKind kind, std::uint64_t seed, const TrialContext& ctx,
                        const ErrorSet* errors) {
  if (phase != 1 && phase != 2) throw std::invalid_argument("phase must be 1 or 2");
  const Pose2D start = ctx.world->start;
  Pose2D offset = Pose2D::identity();
  if (phase == 2) {
    if (!errors || errors->empty()) throw MissingErrorSet("phase 2 needs a non-empty error set; run phase 1 first");
    sim::Rng rng(offset_seed(seed));
    offset = sample_initial_error(*errors, rng);
  }
  SessionRecord rec = mission::run_mission(*ctx.world, compose(start, offset), start, kind, ctx.map, *ctx.waypoints,
                                           ctx.mission, seed);
  rec.phase = phase;
  rec.initial_offset = offset;
  return rec;
}

std::vector<SessionRecord> run_phase_serial(int phase, LocalizerKind kind, std::uint64_t base_seed, int m,
                                            const TrialContext& ctx, const ErrorSet* errors) {
  std::vector<SessionRecord> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out.push_back(run_trial(phase, kind, base_seed + static_cast<std::uint64_t>(i), ctx, errors));
  return out;
}

std::vector<SessionRecord> run_phase(int phase, LocalizerKind kind, std::uint64_t base_seed, int m,
                                     const TrialContext& ctx, const ErrorSet* errors, int workers) {
  if (workers <= 1) return run_phase_serial(phase, kind, base_seed, m, ctx, errors);
  if (phase == 2 && (!errors || errors->empty())) {
    throw MissingErrorSet("phase 2 needs a non-empty error set; run phase 1 first");
  }
  std::vector<SessionRecord> out(static_cast<std::size_t>(m));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int i = 0; i < m; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_trial(phase, kind, base_seed + static_cast<std::uint64_t>(i), ctx, errors);
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (kinds.empty()) throw std::invalid_argument("no localizer selected");
  if (phases.empty()) throw std::invalid_argument("no phase selected");
  for (int p : phases) {
    if (p != 1 && p != 2) throw std::invalid_argument("phase must be 1 or 2");
  }
  if (map_cell <= 0.0) throw std::invalid_argument("map cell must be positive");
}

const GroupSummary* ExperimentResult::group(int phase, LocalizerKind kind) const {
  for (const auto& g : groups) {
    if (g.phase == phase && g.kind == kind) return &g;
  }
  return nullptr;
}

std::vector<GroupSummary> summarize(const std::vector<RecordRow>& rows, int n_waypoints) {
  std::map<std::pair<int, int>, std::vector<RecordRow>> buckets;
  for (const auto& r : rows) buckets[{r.phase, static_cast<int>(r.kind)}].push_back(r);
  std::vector<GroupSummary> out;
  for (const auto& [key, group_rows] : buckets) {
    GroupSummary g;
    g.phase = key.first;
    g.kind = static_cast<LocalizerKind>(key.second);
    try {
      g.acc = accuracy(group_rows);
    } catch (const UndefinedResult&) {
    }
    g.prec = precision(group_rows);
    g.success = success_rates(group_rows, n_waypoints);
    for (const auto& p : g.prec.rows) g.hulls[p.wp] = convex_hull(arrival_offsets(group_rows, p.wp));
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

fs::path with_out(const ExperimentConfig& cfg, const std::string& name) { return cfg.out / name; }

std::string errset_name(LocalizerKind k) { return std::string("errset_") + mission::to_string(k) + ".txt"; }

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const sim::World world = sim::load_world(cfg.world.string());
  const mission::WaypointList wps = mission::load_waypoints(cfg.waypoints.string());
  if (wps.empty()) throw std::invalid_argument("waypoint file holds no waypoints");
  if (!cfg.out.empty()) fs::create_directories(cfg.out);

  ExperimentResult result;
  result.n_waypoints = static_cast<int>(wps.size());

  TrialContext ctx;
  ctx.world = &world;
  ctx.waypoints = &wps;
  ctx.mission = cfg.mission;

  const bool need_map =
      std::find(cfg.kinds.begin(), cfg.kinds.end(), LocalizerKind::PriorMap) != cfg.kinds.end();
  if (need_map) {
    if (!cfg.refmap.empty()) {
      ctx.map = std::make_shared<refmap::ReferenceMap>(refmap::load_refmap(cfg.refmap.string()));
    } else {
      const auto tape = refmap::load_tape(cfg.tape.string());
      const auto teleop = refmap::record_drive(world, tape, cfg.mission.lidar, cfg.mission.noise, cfg.map_seed,
                                               cfg.mission.robot_radius);
      refmap::AccumulateStats stats;
      auto built = refmap::accumulate(teleop, cfg.map_icp, cfg.map_cell, 0.1, &stats);
      if (log && stats.icp_fallbacks > 0) {
        *log << "warning: " << stats.icp_fallbacks << " of " << stats.frames
             << " mapping frames fell back to odometry\n";
      }
      if (!cfg.out.empty()) {
        const auto path = with_out(cfg, "refmap.txt").string();
        refmap::save_refmap(built, path);
        built = refmap::load_refmap(path);
      }
      ctx.map = std::make_shared<refmap::ReferenceMap>(std::move(built));
    }
    result.map_points = ctx.map->points.size();
    if (log) *log << "reference map: " << result.map_points << " points\n";
  }

  const bool run1 = std::find(cfg.phases.begin(), cfg.phases.end(), 1) != cfg.phases.end();
  const bool run2 = std::find(cfg.phases.begin(), cfg.phases.end(), 2) != cfg.phases.end();

  std::map<LocalizerKind, ErrorSet> errsets;
  std::vector<RecordRow> rows;
  auto collect = [&](const std::vector<SessionRecord>& trials) {
    for (std::size_t i = 0; i < trials.size(); ++i) {
      for (const auto& r : to_rows(trials[i], static_cast<int>(i), wps)) rows.push_back(quantized(r));
    }
  };

  if (run1) {
    for (LocalizerKind kind : cfg.kinds) {
      const auto trials = run_phase(1, kind, cfg.seed, cfg.m, ctx, nullptr, cfg.workers);
      collect(trials);
      ErrorSet set = build_error_set(trials, wps);
      if (log) {
        *log << "phase 1 " << mission::to_string(kind) << ": " << set.errors.size() << " of " << cfg.m
             << " trials completed\n";
      }
      if (!cfg.out.empty()) {
        const auto path = with_out(cfg, errset_name(kind)).string();
        save_errset(set, path);
        set = load_errset(path);
      }
      errsets[kind] = std::move(set);
    }
  }

  if (run2) {
    for (LocalizerKind kind : cfg.kinds) {
      if (!errsets.count(kind)) {
        const auto it = cfg.errsets.find(kind);
        if (it != cfg.errsets.end()) {
          errsets[kind] = load_errset(it->second.string());
        } else if (!cfg.out.empty() && fs::exists(with_out(cfg, errset_name(kind)))) {
          errsets[kind] = load_errset(with_out(cfg, errset_name(kind)).string());
        } else {
          throw MissingErrorSet(std::string("phase 2 for ") + mission::to_string(kind) +
                                " needs an error set; run phase 1 first or pass one with errset." +
                                mission::to_string(kind));
        }
      }
      const ErrorSet& set = errsets[kind];
      if (set.empty()) {
        throw MissingErrorSet(std::string("error set for ") + mission::to_string(kind) +
                              " is empty: no phase-1 trial completed the mission");
      }
      collect(run_phase(2, kind, cfg.seed, cfg.m, ctx, &set, cfg.workers));
    }
  }

  result.rows = std::move(rows);
  result.groups = summarize(result.rows, result.n_waypoints);
  if (!cfg.out.empty()) write_report(result, cfg.out);
  return result;
}

std::string scatter_svg(const std::vector<Point2>& offsets, const std::vector<Point2>& hull, const std::string& title) {
  double extent = 0.05;
  for (const auto& p : offsets) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  extent *= 1.15;
  const double size = 400.0;
  const double margin = 40.0;
  const double scale = (size - 2 * margin) / (2 * extent);
  auto sx = [&](double x) { return margin + (x + extent) * scale; };
  auto sy = [&](double y) { return size - margin - (y + extent) * scale; };
  std::ostringstream s;
  s << std::fixed << std::setprecision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
    << size << ' ' << size << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << size / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  s << "<line x1=\"" << sx(-extent) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(extent) << "\" y2=\"" << sy(0)
    << "\" stroke=\"#bbb\"/>\n";
  s << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(-extent) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(extent)
    << "\" stroke=\"#bbb\"/>\n";
  s << "<text x=\"" << margin << "\" y=\"" << size - 10 << "\" font-size=\"11\">half-width " << extent
    << " m</text>\n";
  if (hull.size() >= 2) {
    s << "<polygon fill=\"rgba(70,130,180,0.15)\" stroke=\"steelblue\" points=\"";
    for (const auto& p : hull) s << sx(p.x) << ',' << sy(p.y) << ' ';
    s << "\"/>\n";
  }
  for (const auto& p : offsets) {
    s << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"2.5\" fill=\"black\"/>\n";
  }
  s << "<path d=\"M " << sx(0) - 6 << ' ' << sy(0) << " L " << sx(0) + 6 << ' ' << sy(0) << " M " << sx(0) << ' '
    << sy(0) - 6 << " L " << sx(0) << ' ' << sy(0) + 6 << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
  s << "</svg>\n";
  return s.str();
}

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

}  // namespace

void write_report(const ExperimentResult& result, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir / "plots", ec);
  if (ec) throw std::runtime_error("cannot create " + (out_dir / "plots").string() + ": " + ec.message());
  {
    auto f = open_out(out_dir / "records.csv");
    write_records_csv(f, result.rows);
  }
  {
    auto f = open_out(out_dir / "aggregates.csv");
    f << "phase,localizer,m,arrivals,acc_trans,acc_rot,first_goal,final_goal,first_rate,final_rate\n";
    for (const auto& g : result.groups) {
      f << g.phase << ',' << mission::to_string(g.kind) << ',' << g.success.m << ','
        << (g.acc ? g.acc->arrivals : 0) << ',' << (g.acc ? format_f6(g.acc->trans) : "") << ','
        << (g.acc ? format_f6(g.acc->rot) : "") << ',' << g.success.first_goal << ',' << g.success.final_goal << ','
        << format_f6(g.success.first_rate()) << ',' << format_f6(g.success.final_rate()) << '\n';
    }
  }
  {
    auto f = open_out(out_dir / "precision.csv");
    f << "phase,localizer,wp,arrivals,trans_prec,rot_prec\n";
    for (const auto& g : result.groups) {
      for (const auto& p : g.prec.rows) {
        f << g.phase << ',' << mission::to_string(g.kind) << ',' << p.wp << ',' << p.arrivals << ','
          << format_f6(p.trans_prec) << ',' << format_f6(p.rot_prec) << '\n';
      }
    }
  }
  for (const auto& g : result.groups) {
    std::vector<RecordRow> sub;
    for (const auto& r : result.rows) {
      if (r.phase == g.phase && r.kind == g.kind) sub.push_back(r);
    }
    for (const auto& p : g.prec.rows) {
      const std::string name = "phase" + std::to_string(g.phase) + "_" + mission::to_string(g.kind) + "_wp" +
                               std::to_string(p.wp);
      auto f = open_out(out_dir / "plots" / (name + ".svg"));
      f << scatter_svg(arrival_offsets(sub, p.wp), g.hulls.at(p.wp), name);
    }
  }
}

void print_summary(std::ostream& out, const ExperimentResult& result) {
  out << "phase  localizer  m    arrivals  acc_trans   acc_rot     first  final\n";
  for (const auto& g : result.groups) {
    out << std::left << std::setw(7) << g.phase << std::setw(11) << mission::to_string(g.kind) << std::setw(5)
        << g.success.m << std::setw(10) << (g.acc ? g.acc->arrivals : 0) << std::setw(12)
        << (g.acc ? format_f6(g.acc->trans) : "-") << std::setw(12) << (g.acc ? format_f6(g.acc->rot) : "-")
        << std::setw(7) << g.success.first_goal << g.success.final_goal << '\n';
  }
  out << std::right;
  for (const auto& g : result.groups) {
    out << "\nprecision, phase " << g.phase << ' ' << mission::to_string(g.kind) << '\n';
    out << "wp  arrivals  trans_prec  rot_prec\n";
    for (const auto& p : g.prec.rows) {
      out << std::left << std::setw(4) << p.wp << std::setw(10) << p.arrivals << std::setw(12)
          << format_f6(p.trans_prec) << format_f6(p.rot_prec) << '\n';
    }
    out << std::right;
    for (int wp : g.prec.omitted) out << "wp " << wp << ": no arrivals\n";
  }
}

}  // namespace wpnav::bench
