#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

/// Runs the command-line tool with stdout captured to a file.
Run cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stdout.txt";
  const std::string cmd = std::string(WPNAV_CLI) + ' ' + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wpnav_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("build-map and navigate") {
  const fs::path dir = fresh_dir("nav");
  const std::string world = wpnav::test::data_path("desk.world");
  const std::string tape = wpnav::test::data_path("desk.tape");
  const fs::path map_a = dir / "a.map";
  const fs::path map_b = dir / "b.map";

  CHECK(cli("build-map --world " + world + " --tape " + tape + " --out " + map_a.string(), dir).code == 0);
  CHECK(cli("build-map --world " + world + " --tape " + tape + " --out " + map_b.string(), dir).code == 0);
  const std::string text = slurp(map_a);
  CHECK(text.size() > 100);
  CHECK(text == slurp(map_b));

  CHECK(cli("build-map --world " + (dir / "none.world").string() + " --tape " + tape, dir).code == 2);
  CHECK(cli("navigate --world " + (dir / "none.world").string() + " --waypoints " + wpnav::test::data_path("desk.wp"), dir)
            .code == 2);

  const fs::path wp = dir / "two.wp";
  std::ofstream(wp) << "WAYPOINTS 1\nwp 3 0 0\nwp 0.5 0 3.141592653589793\n";
  const std::string nav = "navigate --world " + world + " --refmap " + map_a.string() + " --waypoints " + wp.string();

  const Run ok = cli(nav + " --localizer icp --out " + (dir / "rec.csv").string(), dir);
  CHECK(ok.code == 0);
  CHECK(count(ok.out, " REACHED ") == 2);
  CHECK(fs::exists(dir / "rec.csv"));

  const Run lost = cli(nav + " --localizer icp --offset 5 5 1", dir);
  CHECK(lost.code == 4);
  CHECK(count(lost.out, "FAILED_LOCALIZATION") == 1);

  const Run slam = cli(nav + " --localizer gridslam --zero-noise", dir);
  CHECK(slam.code == 0);
  CHECK(count(slam.out, " REACHED ") == 2);

  CHECK(cli(nav + " --localizer amcl", dir).code != 0);
  fs::remove_all(dir);
}

TEST_CASE("experiment and report") {
  const fs::path dir = fresh_dir("exp");
  const fs::path wp = dir / "one.wp";
  std::ofstream(wp) << "WAYPOINTS 1\nwp 2 0 0\n";
  const fs::path cfg = dir / "small.cfg";
  std::ofstream(cfg) << "EXPERIMENT 1\nworld " << wpnav::test::data_path("desk.world") << "\nwaypoints " << wp.string()
                     << "\ntape " << wpnav::test::data_path("desk.tape") << "\nm 2\nlocalizers gridslam\n";

  const Run missing = cli("experiment " + cfg.string() + " --phase 2 --out " + (dir / "p2").string(), dir);
  CHECK(missing.code == 5);
  CHECK(missing.out.find("phase 1") != std::string::npos);

  const fs::path out = dir / "res";
  const Run run = cli("experiment " + cfg.string() + " --out " + out.string(), dir);
  CHECK(run.code == 0);
  for (const char* name : {"records.csv", "aggregates.csv", "precision.csv", "errset_gridslam.txt"})
    CHECK(fs::exists(out / name));
  CHECK(fs::exists(out / "plots" / "phase2_gridslam_wp1.svg"));

  const Run rep = cli("report --records " + (out / "records.csv").string() + " --out " + (dir / "rep").string(), dir);
  CHECK(rep.code == 0);
  CHECK(slurp(dir / "rep" / "aggregates.csv") == slurp(out / "aggregates.csv"));
  CHECK(slurp(dir / "rep" / "precision.csv") == slurp(out / "precision.csv"));

  CHECK(cli("experiment " + (dir / "nope.cfg").string(), dir).code == 2);
  fs::remove_all(dir);
}
