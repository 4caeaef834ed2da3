#include "wrcosim/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "wrcosim/cosim.hpp"
#include "wrcosim/csv.hpp"
#include "wrcosim/oracle.hpp"
#include "wrcosim/studies.hpp"
#include "wrcosim/svg.hpp"
#include "wrcosim/topology.hpp"

namespace wrcosim {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string netlist;
  std::string scheme = "gs";
  double window = 0.5;
  double dt = 1e-3;
  int kmax = 8;
  double tol = 1e-8;
  double t_end = 5.0;
  std::string out_dir = ".";
  bool out_dir_given = false;
  int threads = 1;
  bool deterministic = false;
  std::vector<double> h_list{0.5, 0.25, 0.125, 0.0625, 0.03125};
  int k = 1;
  std::vector<double> dt_list{4e-3, 2e-3, 1e-3, 5e-4};
  std::string delta = "smooth";
};

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

WrConfig config_of(const Options& o) {
  WrConfig cfg;
  if (o.scheme == "gs" || o.scheme == "gauss-seidel") cfg.scheme = Scheme::GaussSeidel;
  else if (o.scheme == "jacobi") cfg.scheme = Scheme::Jacobi;
  else throw UsageError("unknown scheme '" + o.scheme + "' (gs, jacobi)");
  cfg.window = o.window;
  cfg.dt = o.dt;
  cfg.max_iterations = o.kmax;
  cfg.tol = o.tol;
  cfg.t_end = o.t_end;
  cfg.threads = o.deterministic ? 1 : o.threads;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  return cfg;
}

class Session {
 public:
  Session(const Options& o, std::ostream& out) : options_(o), out_(out) {}

  CircuitGraph load() const {
    try {
      return load_netlist(options_.netlist);
    } catch (const ParseError& ex) {
      throw UsageError(options_.netlist + ": " + ex.what());
    } catch (const std::invalid_argument& ex) {
      throw UsageError(options_.netlist + ": " + ex.what());
    }
  }

  std::string stem() const { return fs::path(options_.netlist).stem().string(); }

  void write(const std::string& suffix, const std::string& contents) {
    const fs::path dir(options_.out_dir);
    fs::create_directories(dir);
    const fs::path path = dir / (stem() + suffix);
    write_text_file(path.string(), contents);
    files_.push_back(path.string());
  }

  void finish(const std::string& verdict) const {
    nlohmann::ordered_json j;
    j["verdict"] = verdict;
    j["files"] = files_;
    out_ << j.dump() << '\n';
  }

  const Options& options() const { return options_; }
  std::ostream& out() { return out_; }

 private:
  const Options& options_;
  std::ostream& out_;
  std::vector<std::string> files_;
};

int cmd_check(Session& s) {
  const CircuitGraph graph = s.load();
  const CvVerdict verdict = predict(graph);
  s.out() << verdict.summary() << '\n' << verdict.to_json() << '\n';
  if (s.options().out_dir_given) s.write("_check.json", verdict.to_json() + "\n");
  s.finish(to_string(verdict.prediction));
  return kExitOk;
}

int cmd_run(Session& s) {
  const WrConfig cfg = config_of(s.options());
  const CircuitGraph graph = s.load();
  const CoupledSystem coupled = make_coupled_system(graph);
  s.out() << predict(graph).summary() << '\n';

  const WrResult result = wr_solve(coupled, cfg);
  s.write("_iterates.csv", iterates_csv(result));
  s.write("_report.json", result.report.to_json(cfg.scheme, cfg.window, cfg.dt) + "\n");
  s.write("_trajectory.csv", trajectory_csv(coupled.mna, result.trajectory));

  const IterateStudy study = iterate_study(graph, cfg);
  const std::string csv = study.csv();
  s.write("_first_window.csv", csv);
  const auto times = study.grid.times();
  std::vector<PlotSeries> series{{"v_mono", to_vector(times), to_vector(study.v_mono.values()), true, false}};
  for (std::size_t k = 0; k < study.iterates.size(); ++k) {
    series.push_back({"k=" + std::to_string(k + 1), to_vector(times),
                      to_vector(study.iterates[k].values()), false, false});
  }
  s.write("_first_window.svg",
          render_svg(series, {"Coupling voltage iterates, first window", "t [s]", "v [V]"}));
  std::vector<std::string> header{"t", "v_mono"};
  for (std::size_t k = 1; k <= study.iterates.size(); ++k) header.push_back("v_f_k" + std::to_string(k));
  s.write("_first_window.gp",
          gnuplot_script(s.stem() + "_first_window.csv", header, "Coupling voltage iterates", false));

  for (const auto& w : result.report.windows)
    s.out() << "window " << w.index << " [" << format_double(w.t0) << ", " << format_double(w.t1)
            << "] " << to_string(w.verdict) << " after " << w.iterations << " iterations\n";
  s.finish(to_string(result.report.verdict));
  return result.report.verdict == Verdict::Diverged ? kExitDiverged : kExitOk;
}

int cmd_mono(Session& s) {
  const WrConfig cfg = config_of(s.options());
  const CircuitGraph graph = s.load();
  const CoupledSystem coupled = make_coupled_system(graph);
  const MonolithicResult mono = monolithic_solve(coupled, cfg.dt, cfg.t_end, cfg.newton);
  s.write("_mono.csv", monolithic_csv(coupled, mono));
  s.out() << "max |P^T z - v| = " << format_double(mono.max_coupling_residual)
          << ", max KCL residual = " << format_double(mono.max_kcl_residual) << '\n';
  s.finish("Solved");
  return kExitOk;
}

int cmd_sweep(Session& s) {
  WrConfig cfg = config_of(s.options());
  const CircuitGraph graph = s.load();
  SweepResult sweep;
  try {
    sweep = order_study(graph, s.options().h_list, s.options().k, cfg);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  s.write("_sweep.csv", sweep.csv());

  PlotSeries ev{"err_v", {}, {}, false, true};
  PlotSeries ei{"err_i", {}, {}, false, true};
  PlotSeries ref{"O(H)", {}, {}, true, false};
  for (const auto& r : sweep.rows) {
    ev.x.push_back(r.H);
    ev.y.push_back(r.err_v);
    ei.x.push_back(r.H);
    ei.y.push_back(r.err_i);
    ref.x.push_back(r.H);
    ref.y.push_back(sweep.rows.front().err_v * r.H / sweep.rows.front().H);
  }
  const std::vector<PlotSeries> series{ev, ei, ref};
  PlotOptions plot{"Error after k = " + std::to_string(s.options().k) + " sweeps", "H [s]",
                   "max error"};
  plot.log_x = plot.log_y = true;
  s.write("_sweep.svg", render_svg(series, plot));
  s.write("_sweep.gp", gnuplot_script(s.stem() + "_sweep.csv", {"H", "err_v", "err_i"},
                                      "Error versus window size", true));

  for (const auto& r : sweep.rows)
    s.out() << "H=" << format_double(r.H) << " err_v=" << format_double(r.err_v)
            << " err_i=" << format_double(r.err_i) << '\n';
  for (const auto& w : sweep.warnings) s.out() << "warning: " << w << '\n';
  if (sweep.fitted_slope) s.out() << "fitted slope " << format_double(*sweep.fitted_slope) << '\n';
  s.finish(sweep.fitted_slope ? "Fitted" : "FitRejected");
  return kExitOk;
}

int cmd_lemma(Session& s) {
  const CircuitGraph graph = s.load();
  DeltaShape shape;
  try {
    shape = parse_delta_shape(s.options().delta);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  LemmaResult lemma;
  try {
    lemma = lemma_check(graph, s.options().dt_list, shape);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  s.write("_lemma.csv", lemma.csv());
  for (const auto& r : lemma.rows)
    s.out() << "dt=" << format_double(r.dt) << " nu_hat=" << format_double(r.nu_hat) << '\n';
  s.finish(lemma.bounded ? "Bounded" : "Unbounded");
  return kExitOk;
}

void final_line(std::ostream& out, const std::string& verdict, const std::string& message) {
  nlohmann::ordered_json j;
  j["verdict"] = verdict;
  j["files"] = nlohmann::ordered_json::array();
  if (!message.empty()) j["error"] = message;
  out << j.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Waveform-relaxation co-simulation of field/circuit systems", "wrcosim"};
  app.require_subcommand(1);

  auto add_netlist = [&](CLI::App* sub) {
    sub->add_option("netlist", o.netlist, "Netlist file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", o.out_dir, "Directory for output files")
        ->capture_default_str()
        ->each([&](const std::string&) { o.out_dir_given = true; });
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--scheme", o.scheme, "gs or jacobi")->capture_default_str();
    sub->add_option("--H", o.window, "Window size [s]")->capture_default_str();
    sub->add_option("--dt", o.dt, "Time step [s]")->capture_default_str();
    sub->add_option("--kmax", o.kmax, "Maximum sweeps per window")->capture_default_str();
    sub->add_option("--tol", o.tol, "Sweep-difference tolerance")->capture_default_str();
    sub->add_option("--t-end", o.t_end, "Simulation end time [s]")->capture_default_str();
    sub->add_option("--threads", o.threads, "Threads for Jacobi sweeps and H sweeps")
        ->capture_default_str();
    sub->add_flag("--deterministic", o.deterministic, "Force the single-thread reference path");
  };

  auto* check = app.add_subcommand("check", "CV-connectivity of the coupling nodes");
  add_netlist(check);
  auto* run = app.add_subcommand("run", "Waveform relaxation over the horizon");
  add_netlist(run);
  add_solver(run);
  auto* mono = app.add_subcommand("mono", "Monolithic reference solution");
  add_netlist(mono);
  add_solver(mono);
  auto* sweep = app.add_subcommand("sweep", "Error versus window size at a fixed sweep count");
  add_netlist(sweep);
  add_solver(sweep);
  sweep->add_option("--H-list", o.h_list, "Window sizes")->delimiter(',')->capture_default_str();
  sweep->add_option("--k", o.k, "Sweeps per window")->capture_default_str();
  auto* lemma = app.add_subcommand("lemma", "Perturbation gain under dt refinement");
  add_netlist(lemma);
  lemma->add_option("--dt-list", o.dt_list, "Time steps")->delimiter(',')->capture_default_str();
  lemma->add_option("--delta", o.delta, "zero, smooth or hat")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    if (code == 0) {
      final_line(out, "Help", "");
      return kExitOk;
    }
    final_line(out, "UsageError", ex.what());
    return kExitUsage;
  }

  Session session(o, out);
  try {
    if (*check) return cmd_check(session);
    if (*run) return cmd_run(session);
    if (*mono) return cmd_mono(session);
    if (*sweep) return cmd_sweep(session);
    return cmd_lemma(session);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    final_line(out, "UsageError", ex.what());
    return kExitUsage;
  } catch (const InconsistentStartError& ex) {
    err << "error: " << ex.what() << '\n';
    final_line(out, "UsageError", ex.what());
    return kExitUsage;
  } catch (const SolverError& ex) {
    err << "solver failure: " << ex.what() << '\n';
    final_line(out, "SolverFailure", ex.what());
    return kExitSolver;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    final_line(out, "UsageError", ex.what());
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "failure: " << ex.what() << '\n';
    final_line(out, "SolverFailure", ex.what());
    return kExitSolver;
  }
}

}  // namespace wrcosim
