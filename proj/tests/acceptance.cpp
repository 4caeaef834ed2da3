// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrcosim/cli.hpp"
#include "wrcosim/cosim.hpp"
#include "wrcosim/studies.hpp"

using namespace wrcosim;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kCheckSeconds = 0.1;
constexpr double kDichotomySeconds = 30.0;
constexpr double kOrderSeconds = 60.0;
constexpr double kSlopeLow = 0.8;
constexpr double kSlopeHigh = 1.2;
constexpr double kRatesSeconds = 60.0;
constexpr double kJacobiGsTolerance = 0.30;
constexpr double kHalvingLow = 0.35;
constexpr double kHalvingHigh = 0.65;
constexpr double kLemmaSeconds = 60.0;
constexpr double kBoundedLow = 0.8;
constexpr double kBoundedHigh = 1.2;
constexpr double kGrowth = 1.5;
constexpr double kFidelitySeconds = 10.0;
constexpr double kExact = 1e-12;

const std::vector<double> kHList{0.5, 0.25, 0.125, 0.0625, 0.03125};
const std::vector<double> kDtList{4e-3, 2e-3, 1e-3, 5e-4};

std::string data(const std::string& name) { return std::string(WRCOSIM_DATA_DIR) + "/" + name; }

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct CliRun {
  int code;
  std::string out;
  nlohmann::json last;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wrcosim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  std::string text = out.str();
  while (!text.empty() && text.back() == '\n') text.pop_back();
  const auto nl = text.rfind('\n');
  return {code, out.str(), nlohmann::json::parse(nl == std::string::npos ? text : text.substr(nl + 1))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int strictly_growing_run(const std::vector<double>& e) {
  int best = 0, run = 0;
  for (std::size_t k = 1; k < e.size(); ++k) {
    run = e[k] > e[k - 1] ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

Check criterion_1(double& seconds_worst) {
  Check c;
  seconds_worst = 0.0;
  for (const char* name : {"circuit_a.net", "circuit_b.net"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = cli({"check", data(name)});
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    seconds_worst = std::max(seconds_worst, s);
    c.require(s < kCheckSeconds, std::string(name) + " check took too long");
    c.require(r.code == kExitOk, std::string(name) + " exit code");
    const bool b = std::string(name) == "circuit_b.net";
    c.require(r.out.find(b ? "CV-connected: true" : "CV-connected: false") != std::string::npos,
              std::string(name) + " connectivity");
    c.require(r.last["verdict"] == (b ? "NoGuarantee" : "ConvergenceGuaranteed"),
              std::string(name) + " prediction");
    if (b) c.require(r.out.find("\"witness\":[\"C\",\"Vs\"]") != std::string::npos, "witness path");
  }
  c.detail << "a: not CV-connected/ConvergenceGuaranteed, b: CV-connected [C, Vs]/NoGuarantee";
  return c;
}

Check criterion_2() {
  Check c;
  const WrConfig cfg;
  const auto a = wr_solve(make_coupled_system(load_netlist(data("circuit_a.net"))), cfg);
  c.require(a.report.verdict == Verdict::Converged, "circuit_a verdict");
  int most = 0;
  for (const auto& w : a.report.windows) {
    most = std::max(most, w.iterations);
    c.require(w.converged && w.iterations <= cfg.max_iterations, "window converged within kMax");
    for (std::size_t k = 2; k < w.errors.size(); ++k)
      c.require(w.errors[k] < w.errors[k - 1], "errors strictly decreasing from k=2");
  }
  const auto b = wr_solve(make_coupled_system(load_netlist(data("circuit_b.net"))), cfg);
  c.require(b.report.verdict == Verdict::Diverged, "circuit_b verdict");
  const int growth = b.report.windows.empty() ? 0 : strictly_growing_run(b.report.windows.front().errors);
  c.require(growth >= 3, "three consecutive growths");
  c.detail << "a: " << a.report.windows.size() << " windows converged, at most " << most
           << " sweeps; b: " << to_string(b.report.verdict) << " after " << growth << " consecutive growths";
  return c;
}

Check criterion_3() {
  Check c;
  const auto r = order_study(load_netlist(data("circuit_a.net")), kHList, 1, WrConfig{});
  c.require(r.fitted_slope.has_value(), "slope fitted");
  const double slope = r.fitted_slope.value_or(NAN);
  c.require(slope >= kSlopeLow && slope <= kSlopeHigh, "slope in range");
  c.detail << "GS k=1 slope " << slope << " in [" << kSlopeLow << ", " << kSlopeHigh << "]";
  return c;
}

Check criterion_4() {
  Check c;
  const auto coupled = make_coupled_system(load_netlist(data("circuit_a.net")));
  WrConfig cfg;
  cfg.max_iterations = 30;
  const auto gs = wr_solve(coupled, cfg);
  cfg.window = 0.25;
  const auto gs_half = wr_solve(coupled, cfg);
  cfg.window = 0.5;
  cfg.scheme = Scheme::Jacobi;
  const auto jacobi = wr_solve(coupled, cfg);
  c.require(gs.report.rates && gs_half.report.rates && jacobi.report.rates, "rates available");
  if (!c.pass) return c;
  const double rho = gs.report.rates->rho;
  const double rho2 = jacobi.report.rates->two_step_rho;
  const double halving = gs_half.report.rates->rho / rho;
  c.require(std::abs(rho2 / rho - 1.0) <= kJacobiGsTolerance, "Jacobi two-step vs GS");
  c.require(halving >= kHalvingLow && halving <= kHalvingHigh, "GS rate halving");
  c.detail << "rho_GS " << rho << ", rho2_Jacobi " << rho2 << " (ratio " << rho2 / rho
           << "), rho(H/2)/rho(H) " << halving;
  return c;
}

Check criterion_5() {
  Check c;
  const auto a = lemma_check(load_netlist(data("circuit_a.net")), kDtList, DeltaShape::Smooth);
  const auto b = lemma_check(load_netlist(data("circuit_b.net")), kDtList, DeltaShape::Hat);
  c.detail << "a ratios";
  for (double q : a.ratios) {
    c.detail << ' ' << q;
    c.require(q >= kBoundedLow && q <= kBoundedHigh, "circuit_a gain bounded");
  }
  c.detail << "; b ratios";
  for (double q : b.ratios) {
    c.detail << ' ' << q;
    c.require(q >= kGrowth, "circuit_b gain growth");
  }
  return c;
}

Check criterion_6() {
  Check c;
  const auto coupled = make_coupled_system(load_netlist(data("circuit_a.net")));
  const WrConfig cfg;
  const auto wr = wr_solve(coupled, cfg);
  const auto mono = monolithic_solve(coupled, cfg.dt, cfg.t_end);
  double slope = 0.0;
  for (std::size_t n = 1; n < mono.grid.size(); ++n)
    slope = std::max(slope, std::abs(mono.v[n] - mono.v[n - 1]) / (mono.grid[n] - mono.grid[n - 1]));
  const double bound = 10.0 * cfg.tol + 5.0 * cfg.dt * slope;
  const double err = max_abs_diff(wr.v, mono.v);
  c.require(err <= bound, "WR vs monolithic");

  const auto cap = lumped_cap(1.0);
  const auto grid = TimeGrid::uniform(0.0, 1.0, cfg.dt);
  const auto out = field_solve_window(*cap, zero_field_state(*cap), Waveform::constant(grid, 1.0), grid);
  double exact_err = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) exact_err = std::max(exact_err, std::abs(out.v[n] - grid[n]));
  c.require(exact_err <= kExact, "lumped capacitor exact");
  c.detail << "|v_wr - v_mono| " << err << " <= " << bound << "; lumped v(t)=t error " << exact_err;
  return c;
}

Check criterion_7() {
  Check c;
  const fs::path base = fs::temp_directory_path() / "wrcosim_acceptance";
  fs::remove_all(base);
  std::vector<fs::path> dirs{base / "one", base / "two"};
  for (const auto& d : dirs) {
    const auto r = cli({"run", data("circuit_a.net"), "--threads", "1", "--deterministic",
                        "--out-dir", d.string()});
    c.require(r.code == kExitOk, "run exit code");
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    c.require(slurp(entry.path()) == slurp(dirs[1] / entry.path().filename()),
              entry.path().filename().string() + " identical");
  }
  c.require(compared > 0, "CSV files written");
  c.detail << compared << " CSV files byte-identical";
  fs::remove_all(base);
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    double limit;
    std::function<Check(double&)> run;
  };
  const std::vector<Entry> entries{
      {1, kCheckSeconds, [](double& s) { return criterion_1(s); }},
      {2, kDichotomySeconds, [](double&) { return criterion_2(); }},
      {3, kOrderSeconds, [](double&) { return criterion_3(); }},
      {4, kRatesSeconds, [](double&) { return criterion_4(); }},
      {5, kLemmaSeconds, [](double&) { return criterion_5(); }},
      {6, kFidelitySeconds, [](double&) { return criterion_6(); }},
      {7, 0.0, [](double&) { return criterion_7(); }},
  };
  int failures = 0;
  for (const auto& e : entries) {
    double own = -1.0;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c = e.run(own);
    } catch (const std::exception& ex) {
      c.pass = false;
      c.detail << "exception: " << ex.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (own >= 0.0) seconds = own;
    if (e.limit > 0.0 && seconds >= e.limit) {
      c.pass = false;
      c.detail << " [failed: runtime limit " << e.limit << " s]";
    }
    if (!c.pass) ++failures;
    std::printf("criterion %d: %s  %s  (%.3f s)\n", e.id, c.pass ? "PASS" : "FAIL",
                c.detail.str().c_str(), seconds);
  }
  return failures == 0 ? 0 : 1;
}
