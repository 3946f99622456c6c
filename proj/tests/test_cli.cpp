// End-to-end checks of the command-line tool: exit codes, artifact
// creation, diagnostics format, and byte-level determinism.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "crnosc/report_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string dir;
};

int run_in(const std::string& dir, const std::string& args) {
  fs::create_directories(dir);
  std::string cmd = std::string(CRNOSC_CLI_PATH) + " --out-dir " + dir + " " + args +
                    " >" + dir + "/stdout.txt 2>" + dir + "/stderr.txt";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string sandbox() {
  static int counter = 0;
  std::string dir = (fs::temp_directory_path() / ("crnosc_cli_" + std::to_string(::getpid()) +
                                                  "_" + std::to_string(counter++)))
                        .string();
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("analyze a builtin model writes a full report") {
  std::string dir = sandbox();
  REQUIRE(run_in(dir, "analyze --model fb --k6 0.187 --k8 0.0052") == 0);
  json j = json::parse(crn::read_file(dir + "/analysis.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(j["structure"]["deficiency"] == 1);
  CHECK(j["stability"]["classification"] == "stable");
  CHECK(j["competitivity"]["competitive"] == true);
}

TEST_CASE("analyze a network file without rates is structure-only") {
  std::string dir = sandbox();
  REQUIRE(run_in(dir, std::string("analyze --file ") + CRNOSC_SOURCE_DIR +
                          "/networks/edelstein.crn") == 0);
  json j = json::parse(crn::read_file(dir + "/analysis.json"));
  CHECK(j["structure"]["deficiency"] == 1);
  CHECK(j["structure"]["rank"] == 2);
  CHECK(!j.contains("stability"));
  json flags = j["structure"]["flags"];
  for (auto& f : flags) CHECK(f != "UniquePositiveEquilibrium");
}

TEST_CASE("parse failures exit with the analysis code and diagnostics") {
  std::string dir = sandbox();
  std::ofstream(dir + "/garbage.crn") << "X -> ;;; what\nY -> X\n";
  CHECK(run_in(dir, "parse --file " + dir + "/garbage.crn") == 1);
  std::string err = crn::read_file(dir + "/stderr.txt");
  CHECK(err.find("garbage.crn:1:") != std::string::npos);
  CHECK(err.find("error:") != std::string::npos);
}

TEST_CASE("parse emits the canonical form") {
  std::string dir = sandbox();
  std::ofstream(dir + "/net.crn") << "A + A -> B ; k1\n";
  REQUIRE(run_in(dir, "parse --file " + dir + "/net.crn") == 0);
  std::string out = crn::read_file(dir + "/stdout.txt");
  CHECK(out.find("2A -> B ; k1") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  std::string dir = sandbox();
  CHECK(run_in(dir, "hopf-scan --model fb --p1 k6:0.2:0.2 --p2 k8:0.1:0.2 --res 10") == 2);
  CHECK(run_in(dir, "analyze --model nosuch") == 2);
  CHECK(run_in(dir, "analyze") == 2);
  CHECK(run_in(dir, "definitely-not-a-subcommand") == 2);
}

TEST_CASE("hopf-scan writes csv artifacts and an svg diagram") {
  std::string dir = sandbox();
  REQUIRE(run_in(dir, "hopf-scan --model wh-h --fix q=1,r=2,s=1 --p1 t:0.05:4 --p2 p:4:12 "
                      "--res 24") == 0);
  CHECK(fs::exists(dir + "/scan.csv"));
  CHECK(fs::exists(dir + "/boundary.csv"));
  CHECK(fs::exists(dir + "/diagram.svg"));
  json j = json::parse(crn::read_file(dir + "/scan_summary.json"));
  REQUIRE(j["degenerate_points"].size() == 1);
  double t_star = j["degenerate_points"][0][0], p_star = j["degenerate_points"][0][1];
  CHECK(t_star == doctest::Approx(2.4142).epsilon(1e-3));
  CHECK(p_star == doctest::Approx(7.2426).epsilon(1e-3));
  std::string svg = crn::read_file(dir + "/diagram.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  // The scan csv round-trips through the trajectory-style loader header check.
  std::string csv = crn::read_file(dir + "/scan.csv");
  CHECK(csv.rfind("p1,p2,class,hval,L1", 0) == 0);
}

TEST_CASE("simulate writes a loadable trajectory and a phase portrait") {
  std::string dir = sandbox();
  REQUIRE(run_in(dir, "simulate --model w-h --p 6 --q 1 --r 1 --t0 near-eq --horizon 200 "
                      "--samples 400 --phase X,Y") == 0);
  crn::Trajectory traj = crn::trajectory_from_csv(crn::read_file(dir + "/trajectory.csv"));
  CHECK(traj.times.size() == 400);
  CHECK(traj.states.front().size() == 4);
  CHECK(fs::exists(dir + "/phase.svg"));
}

TEST_CASE("identical invocations produce byte-identical artifacts") {
  std::string d1 = sandbox(), d2 = sandbox();
  std::string cmd = "--seed 42 permanence --model fb-h --starts 3 --t-transient 50 --t-window 50";
  REQUIRE(run_in(d1, cmd) == 0);
  REQUIRE(run_in(d2, cmd) == 0);
  CHECK(crn::read_file(d1 + "/permanence.json") == crn::read_file(d2 + "/permanence.json"));

  std::string scan = "hopf-scan --model fb --p1 k6:0.05:0.3 --p2 k8:0.05:0.3 --res 12";
  REQUIRE(run_in(d1, scan) == 0);
  REQUIRE(run_in(d2, scan) == 0);
  CHECK(crn::read_file(d1 + "/scan.csv") == crn::read_file(d2 + "/scan.csv"));
  CHECK(crn::read_file(d1 + "/boundary.csv") == crn::read_file(d2 + "/boundary.csv"));
}

TEST_CASE("equilibria and focal subcommands agree with the formulas") {
  std::string dir = sandbox();
  REQUIRE(run_in(dir, "equilibria --model wh-h --p 8 --q 1 --r 2 --s 1 --t 1") == 0);
  json j = json::parse(crn::read_file(dir + "/equilibria.json"));
  CHECK(j["closed_form"][3] == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(j["newton"]["converged"] == true);

  REQUIRE(run_in(dir, "focal --model w --k 6,1,6,0.5") == 0);
  json f = json::parse(crn::read_file(dir + "/focal.json"));
  CHECK(double(f["closed_frame_L1"]) == doctest::Approx(-47.0 / 1300.0).epsilon(1e-8));
  CHECK(double(f["pipeline_L1"]) < 0.0);
}

TEST_CASE("cycles on the three-species oscillator finds one stable cycle") {
  std::string dir = sandbox();
  REQUIRE(run_in(dir, "cycles --model wh --k 3.5,1,1,1,1") == 0);
  json j = json::parse(crn::read_file(dir + "/cycles.json"));
  CHECK(j["equilibrium_class"] == "unstable");
  CHECK(j["cycle"]["outcome"] == "cycle");
  CHECK(j["cycle"]["stability"] == "stable");
  CHECK(double(j["cycle"]["spectral_radius"]) < 1.0);
  CHECK(fs::exists(dir + "/cycle_stable.csv"));
}
