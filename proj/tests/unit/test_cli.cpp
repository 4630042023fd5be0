#include "pinnet/cli.hpp"
#include "pinnet/output.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace pinnet;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = PINNET_TEST_SCENARIO_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("pinnet_cli_" + tag + "_" + std::to_string(Catch::getSeed()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

const char* kBlowUp = R"(schema_version: 1
name: blowup
model:
  nodes: 1
  dynamics: {kind: linear, params: {matrix: [[50]]}}
reference: {initial: [0]}
controller: {gain: 0}
initial: {states: [1]}
integration: {dt: 0.01, t_end: 10}
)";

const char* kOverflow = R"(schema_version: 1
name: overflow
model:
  nodes: 1
  dynamics: {kind: linear, params: {matrix: [[1.0e300]]}}
reference: {initial: [0]}
controller: {gain: 1}
initial: {states: [1]}
estimation:
  method: sampled
  samples: 1000
  region: {low: [-1.0e10], high: [1.0e10]}
)";

}  // namespace

TEST_CASE("certify exit codes", "[cli]") {
  const Run stable = run({"certify", (kScenarios / "linear_stable.yaml").string()});
  CHECK(stable.code == kExitOk);
  CHECK_THAT(stable.out, ContainsSubstring("certified"));
  const Run unstable = run({"certify", (kScenarios / "linear_unpinned.yaml").string()});
  CHECK(unstable.code == kExitNotCertified);
  CHECK_THAT(unstable.out, ContainsSubstring("not certified"));
  // a large enough gain flips the verdict
  CHECK(run({"certify", (kScenarios / "linear_unpinned.yaml").string(), "--gain", "5"}).code == kExitOk);

  TempDir dir("certify");
  const Run failed = run({"certify", write(dir.path, "overflow.yaml", kOverflow).string()});
  CHECK(failed.code == kExitEstimationFailed);
}

TEST_CASE("usage errors exit 64", "[cli]") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"simulate"}).code == kExitUsage);
  CHECK(run({"simulate", "x.yaml", "--dt"}).code == kExitUsage);
  CHECK(run({"simulate", "x.yaml", "--dt", "abc"}).code == kExitUsage);
  CHECK(run({"simulate", "x.yaml", "--dt", "-1"}).code == kExitUsage);
  CHECK(run({"certify", "/nonexistent.yaml"}).code == kExitUsage);
  CHECK(run({"sweep", (kScenarios / "linear_stable.yaml").string()}).code == kExitUsage);
  TempDir dir("usage");
  const Run bad = run({"certify", write(dir.path, "bad.yaml", "schema_version: 1\nname: x\nbogus: 1\n").string()});
  CHECK(bad.code == kExitUsage);
  CHECK_THAT(bad.err, ContainsSubstring("line 3"));
  const Run help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK_THAT(help.out, ContainsSubstring("reproduce"));
}

TEST_CASE("simulate writes the run directory", "[cli]") {
  TempDir dir("simulate");
  const Run r = run({"simulate", (kScenarios / "linear_stable.yaml").string(), "--out", dir.path.string(),
                     "--t-end", "3", "--dt", "0.005", "--gain", "2.5", "--seed", "11"});
  REQUIRE(r.code == kExitOk);
  const fs::path run_dir = dir.path / "linear_stable";
  for (const char* f : {"scenario.yaml", "timeseries.csv", "summary.json", "states.svg", "errors.svg", "inputs.svg"}) {
    CHECK(fs::exists(run_dir / f));
  }
  const auto table = read_timeseries(run_dir / "timeseries.csv");
  CHECK(table.column("t").back() == 3.0);
  std::ifstream in(run_dir / "summary.json");
  const auto summary = nlohmann::json::parse(in);
  CHECK(summary["seed"] == 11);
  CHECK(summary["certificate"]["gain"] == 2.5);
  // summary lands before the plots
  CHECK(fs::last_write_time(run_dir / "summary.json") <= fs::last_write_time(run_dir / "states.svg"));
}

TEST_CASE("output directory from the environment", "[cli]") {
  TempDir dir("env");
  ::setenv("PINNET_OUT_DIR", dir.path.string().c_str(), 1);
  const Run r = run({"simulate", (kScenarios / "linear_stable.yaml").string(), "--no-plots", "--t-end", "1"});
  ::unsetenv("PINNET_OUT_DIR");
  REQUIRE(r.code == kExitOk);
  CHECK(fs::exists(dir.path / "linear_stable" / "timeseries.csv"));
  CHECK_FALSE(fs::exists(dir.path / "linear_stable" / "states.svg"));
}

TEST_CASE("runtime faults exit 70 and keep the partial record", "[cli]") {
  TempDir dir("fault");
  const Run r = run({"simulate", write(dir.path, "blowup.yaml", kBlowUp).string(), "--out", dir.path.string()});
  CHECK(r.code == kExitRuntimeFault);
  CHECK_THAT(r.err, ContainsSubstring("exceeded"));
  CHECK(fs::exists(dir.path / "blowup" / "timeseries.partial.csv"));
}

TEST_CASE("sweep appends one row per gain", "[cli]") {
  TempDir dir("sweep");
  const std::string scenario = (kScenarios / "linear_stable.yaml").string();
  const Run first = run({"sweep", scenario, "--gains", "0,1,2,3", "--jobs", "3", "--t-end", "2",
                         "--out", dir.path.string()});
  REQUIRE(first.code == kExitOk);
  const Run second = run({"sweep", scenario, "--gain-min", "0", "--gain-max", "4", "--gain-steps", "3",
                          "--t-end", "2", "--out", dir.path.string()});
  REQUIRE(second.code == kExitOk);
  const auto table = read_timeseries(dir.path / "linear_stable_sweep.csv");
  CHECK(table.header.front() == "gain");
  CHECK(table.rows.size() == 7);
  std::vector<double> gains = table.column("gain");
  std::sort(gains.begin(), gains.begin() + 4);
  CHECK(gains == std::vector<double>{0, 1, 2, 3, 0, 2, 4});
  const auto certified = table.column("certified");
  const auto lambda = table.column("lambda_max");
  for (std::size_t k = 0; k < certified.size(); ++k) CHECK((certified[k] == 1.0) == (lambda[k] <= 0.0));
}

TEST_CASE("reproduce prints one line per check", "[cli]") {
  const Run r = run({"reproduce", "--scenario-dir", kScenarios.string()});
  CHECK_THAT(r.out, ContainsSubstring("kuramoto.final_error"));
  CHECK_THAT(r.out, ContainsSubstring("jansen_rit.suppression"));
  const bool any_fail = r.out.find("[FAIL]") != std::string::npos;
  CHECK(r.code == (any_fail ? kExitNotCertified : kExitOk));
}
