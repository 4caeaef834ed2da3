#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support.hpp"
#include "wrcosim/cli.hpp"

using namespace wrcosim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  nlohmann::json last;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "wrcosim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  const std::string text = out.str();
  const auto end = text.find_last_not_of('\n');
  const auto start = text.rfind('\n', end);
  const std::string last = text.substr(start == std::string::npos ? 0 : start + 1, end - start);
  return {code, text, err.str(), nlohmann::json::parse(last)};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wrcosim_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_netlist(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("check reports the witness path") {
  const auto r = invoke({"check", testing::data_path("circuit_b.net")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("CV-connected: true") != std::string::npos);
  CHECK(r.out.find("[C, Vs]") != std::string::npos);
  CHECK(r.last["verdict"] == "NoGuarantee");
  CHECK(r.last["files"].empty());

  const auto a = invoke({"check", testing::data_path("circuit_a.net")});
  CHECK(a.out.find("CV-connected: false") != std::string::npos);
  CHECK(a.last["verdict"] == "ConvergenceGuaranteed");
}

TEST_CASE("check writes its verdict when given an output directory") {
  const auto dir = scratch_dir("check");
  const auto r = invoke({"check", testing::data_path("circuit_b.net"), "--out-dir", dir.string()});
  REQUIRE(r.last["files"].size() == 1);
  const auto j = nlohmann::json::parse(slurp(r.last["files"][0].get<std::string>()));
  CHECK(j["cv_connected"] == true);
}

TEST_CASE("run on the convergent circuit") {
  const auto dir = scratch_dir("run_a");
  const auto r = invoke({"run", testing::data_path("circuit_a.net"), "--scheme", "gs", "--H", "0.5",
                         "--dt", "1e-3", "--kmax", "8", "--tol", "1e-8", "--t-end", "5",
                         "--out-dir", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.last["verdict"] == "Converged");
  CHECK(r.last["files"].size() >= 3);
  for (const auto& f : r.last["files"]) CHECK(fs::exists(f.get<std::string>()));
  CHECK(fs::exists(dir / "circuit_a_iterates.csv"));
  CHECK(fs::exists(dir / "circuit_a_report.json"));
}

TEST_CASE("run on the divergent circuit") {
  const auto dir = scratch_dir("run_b");
  const auto r = invoke({"run", testing::data_path("circuit_b.net"), "--out-dir", dir.string()});
  CHECK(r.code == kExitDiverged);
  CHECK(r.last["verdict"] == "Diverged");
}

TEST_CASE("identical invocations give identical files") {
  const auto one = scratch_dir("det_1");
  const auto two = scratch_dir("det_2");
  for (const auto& dir : {one, two})
    invoke({"run", testing::data_path("circuit_a.net"), "--t-end", "1", "--deterministic",
            "--out-dir", dir.string()});
  for (const auto& entry : fs::directory_iterator(one))
    CHECK(slurp(entry.path()) == slurp(two / entry.path().filename()));
}

TEST_CASE("mono, sweep and lemma") {
  const auto dir = scratch_dir("studies");
  const auto mono = invoke({"mono", testing::data_path("circuit_a.net"), "--t-end", "1",
                            "--out-dir", dir.string()});
  CHECK(mono.code == kExitOk);
  CHECK(fs::exists(dir / "circuit_a_mono.csv"));

  const auto sweep = invoke({"sweep", testing::data_path("circuit_a.net"), "--H-list",
                             "0.5,0.25,0.125,0.0625,0.03125", "--k", "1", "--out-dir", dir.string()});
  CHECK(sweep.code == kExitOk);
  CHECK(sweep.last["verdict"] == "Fitted");
  CHECK(fs::exists(dir / "circuit_a_sweep.csv"));
  CHECK(fs::exists(dir / "circuit_a_sweep.svg"));

  const auto lemma = invoke({"lemma", testing::data_path("circuit_b.net"), "--dt-list",
                             "4e-3,2e-3,1e-3", "--delta", "hat", "--out-dir", dir.string()});
  CHECK(lemma.code == kExitOk);
  CHECK(lemma.last["verdict"] == "Unbounded");
  CHECK(slurp(dir / "circuit_b_lemma.csv").rfind("dt,nu_hat\n", 0) == 0);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"frobnicate"}).code == kExitUsage);
  CHECK(invoke({"run", "/nonexistent/file.net"}).code == kExitUsage);
  const auto bad_scheme = invoke({"run", testing::data_path("circuit_a.net"), "--scheme", "sor"});
  CHECK(bad_scheme.code == kExitUsage);
  CHECK(bad_scheme.last["verdict"] == "UsageError");
  CHECK(invoke({"run", testing::data_path("circuit_a.net"), "--dt", "-1"}).code == kExitUsage);
  CHECK(invoke({"sweep", testing::data_path("circuit_a.net"), "--H-list", "0.5,0.25"}).code ==
        kExitUsage);
  CHECK(invoke({"lemma", testing::data_path("circuit_a.net"), "--delta", "box"}).code == kExitUsage);

  const auto dir = scratch_dir("bad_netlist");
  const auto bad = write_netlist(dir, "bad.net", "R1 1 0 1\nR2 1 1 2\nF1 1 0 lumped 1\n");
  const auto r = invoke({"check", bad.string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("line 2") != std::string::npos);

  const auto dc = write_netlist(dir, "dc.net", "V1 1 0 dc 1\nR1 1 2 1\nF1 2 0 lumped 1\n");
  CHECK(invoke({"run", dc.string(), "--out-dir", dir.string()}).code == kExitUsage);
}

TEST_CASE("solver failures") {
  const auto dir = scratch_dir("singular");
  const auto loop = write_netlist(dir, "loop.net", "V1 1 0 sin 1 1\nV2 1 0 sin 2 1\nF1 1 0 lumped 1\n");
  const auto r = invoke({"run", loop.string(), "--t-end", "1", "--out-dir", dir.string()});
  CHECK(r.code == kExitSolver);
  CHECK(r.last["verdict"] == "SolverFailure");
}

TEST_CASE("help") {
  const auto r = invoke({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.last["verdict"] == "Help");
}

}  // TEST_SUITE
