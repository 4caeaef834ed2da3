#include "wrcosim/studies.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "wrcosim/csv.hpp"
#include "wrcosim/oracle.hpp"

namespace wrcosim {

IterateStudy iterate_study(const CircuitGraph& graph, const WrConfig& cfg) {
  WrConfig run = cfg;
  run.t_end = cfg.window;
  run.abort_on_divergence = false;
  run.validate();

  const CoupledSystem coupled = make_coupled_system(graph);
  const CoupledState start = consistent_start(coupled, 0.0);
  const TimeGrid grid = TimeGrid::uniform(0.0, run.window, run.dt);
  MonolithicResult mono = monolithic_solve(coupled, start, grid, run.newton);
  WindowResult window =
      wr_window(*coupled.field, coupled.mna, start, grid, 0.0, 0.0, run, 0);

  IterateStudy study{grid, std::move(mono.v), std::move(window.v_iterates), {},
                     std::move(window.report), predict(graph)};
  for (const auto& v : study.iterates) study.errors_vs_mono.push_back(max_abs_diff(v, study.v_mono));
  study.observed_divergence = study.report.verdict == Verdict::Diverged;
  const bool guaranteed = study.prediction.prediction == Prediction::ConvergenceGuaranteed;
  study.agrees = guaranteed ? !study.observed_divergence : study.observed_divergence;
  return study;
}

std::string IterateStudy::csv() const {
  std::vector<std::string> header{"t", "v_mono"};
  for (std::size_t k = 1; k <= iterates.size(); ++k) header.push_back("v_f_k" + std::to_string(k));
  CsvTable table(header);
  std::vector<double> row(header.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    row[0] = grid[n];
    row[1] = v_mono[n];
    for (std::size_t k = 0; k < iterates.size(); ++k) row[k + 2] = iterates[k][n];
    table.add_row(row);
  }
  return table.str();
}

double loglog_slope(const std::vector<SweepRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("slope fit needs at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    if (!(r.H > 0.0) || !(r.err_v > 0.0))
      throw std::invalid_argument("slope fit needs positive H and error");
    const double x = std::log(r.H), y = std::log(r.err_v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw std::invalid_argument("slope fit needs distinct H values");
  return (n * sxy - sx * sy) / den;
}

SweepResult order_study(const CircuitGraph& graph, std::vector<double> h_list, int k,
                        const WrConfig& cfg) {
  std::sort(h_list.begin(), h_list.end(), std::greater<>());
  h_list.erase(std::unique(h_list.begin(), h_list.end()), h_list.end());
  if (h_list.size() < 2) throw std::invalid_argument("H list needs at least two distinct values");
  if (!(h_list.back() > 0.0)) throw std::invalid_argument("window sizes must be positive");
  if (h_list.front() / h_list.back() < 10.0 - 1e-9)
    throw std::invalid_argument("H list must span at least one decade");
  if (k < 1) throw std::invalid_argument("k must be at least 1");

  SweepResult result;
  if (predict(graph).prediction == Prediction::NoGuarantee)
    result.warnings.emplace_back("coupling nodes are CV-connected; iteration may diverge");

  const CoupledSystem coupled = make_coupled_system(graph);
  const MonolithicResult mono = monolithic_solve(coupled, cfg.dt, cfg.t_end, cfg.newton);

  auto row_for = [&](double h) {
    WrConfig run = cfg;
    run.window = h;
    run.max_iterations = k;
    run.abort_on_divergence = false;
    run.threads = 1;
    const WrResult wr = wr_solve(coupled, run);
    return SweepRow{h, max_abs_diff(wr.v, mono.v), max_abs_diff(wr.i, mono.i), k};
  };

  if (cfg.threads > 1) {
    std::vector<std::future<SweepRow>> jobs;
    for (double h : h_list) jobs.push_back(std::async(std::launch::async, row_for, h));
    for (auto& j : jobs) result.rows.push_back(j.get());
  } else {
    for (double h : h_list) result.rows.push_back(row_for(h));
  }

  const std::size_t half = (result.rows.size() + 1) / 2;
  const std::vector<SweepRow> fit_rows(result.rows.end() - static_cast<std::ptrdiff_t>(half),
                                       result.rows.end());
  double lo = fit_rows.front().err_v, hi = lo;
  for (const auto& r : fit_rows) {
    lo = std::min(lo, r.err_v);
    hi = std::max(hi, r.err_v);
  }
  const double floor = 10.0 * cfg.tol;
  if (!(lo > 0.0) || hi <= floor || hi / lo < 1.5) {
    result.warnings.emplace_back(
        "errors sit at the discretization floor on the small-H rows; slope fit rejected");
    return result;
  }
  if (fit_rows.size() < 2) {
    result.warnings.emplace_back("too few rows for a slope fit");
    return result;
  }
  result.fitted_slope = loglog_slope(fit_rows);
  const double full = loglog_slope(result.rows);
  if (std::abs(full - *result.fitted_slope) > 0.25) {
    std::ostringstream msg;
    msg << "preasymptotic rows: slope over all rows " << format_double(full)
        << " differs from the small-H slope " << format_double(*result.fitted_slope);
    result.warnings.push_back(msg.str());
  }
  return result;
}

std::string SweepResult::csv() const {
  CsvTable table({"H", "err_v", "err_i"});
  for (const auto& r : rows) {
    const double values[] = {r.H, r.err_v, r.err_i};
    table.add_row(values);
  }
  return table.str();
}

std::string to_string(DeltaShape s) {
  switch (s) {
    case DeltaShape::Zero: return "zero";
    case DeltaShape::Smooth: return "smooth";
    case DeltaShape::Hat: return "hat";
  }
  return "?";
}

DeltaShape parse_delta_shape(const std::string& name) {
  if (name == "zero") return DeltaShape::Zero;
  if (name == "smooth") return DeltaShape::Smooth;
  if (name == "hat") return DeltaShape::Hat;
  throw std::invalid_argument("unknown delta shape '" + name + "' (zero, smooth, hat)");
}

Waveform lemma_delta(DeltaShape shape, const TimeGrid& grid, double dt) {
  std::vector<double> values(grid.size(), 0.0);
  if (shape == DeltaShape::Smooth) {
    for (std::size_t n = 0; n < grid.size(); ++n)
      values[n] = kLemmaAmplitude * std::sin(2.0 * std::numbers::pi * grid[n]);
  } else if (shape == DeltaShape::Hat) {
    const double mid = 0.5 * (grid.front() + grid.back());
    std::size_t centre = 0;
    for (std::size_t n = 1; n < grid.size(); ++n)
      if (std::abs(grid[n] - mid) < std::abs(grid[centre] - mid)) centre = n;
    for (std::size_t n = 0; n < grid.size(); ++n)
      values[n] = kLemmaAmplitude * std::max(0.0, 1.0 - std::abs(grid[n] - grid[centre]) / dt);
  }
  return Waveform(grid, std::move(values));
}

LemmaResult lemma_check(const CircuitGraph& graph, std::vector<double> dt_list, DeltaShape shape) {
  std::sort(dt_list.begin(), dt_list.end(), std::greater<>());
  dt_list.erase(std::unique(dt_list.begin(), dt_list.end()), dt_list.end());
  if (dt_list.empty() || !(dt_list.back() > 0.0))
    throw std::invalid_argument("dt list needs positive values");

  const CoupledSystem coupled = make_coupled_system(graph);
  const CoupledState start = consistent_start(coupled, 0.0);
  LemmaResult result;
  result.shape = shape;
  for (double dt : dt_list) {
    const TimeGrid grid = TimeGrid::uniform(0.0, kLemmaSpan, dt);
    const MonolithicResult mono = monolithic_solve(coupled, start, grid);
    const Waveform delta = lemma_delta(shape, grid, grid[1] - grid[0]);
    const PerturbationGain gain = perturbed_response(coupled.mna, start.circuit, mono.v, delta, grid);
    result.rows.push_back({dt, gain.nu_hat});
  }
  for (std::size_t j = 1; j < result.rows.size(); ++j) {
    const double prev = result.rows[j - 1].nu_hat;
    const double ratio = prev > 0.0 ? result.rows[j].nu_hat / prev : (result.rows[j].nu_hat > 0.0 ? INFINITY : 1.0);
    result.ratios.push_back(ratio);
    if (!(ratio >= 0.8 && ratio <= 1.2)) result.bounded = false;
  }
  return result;
}

std::string LemmaResult::csv() const {
  CsvTable table({"dt", "nu_hat"});
  for (const auto& r : rows) {
    const double values[] = {r.dt, r.nu_hat};
    table.add_row(values);
  }
  return table.str();
}

std::string gnuplot_script(const std::string& csv_name, const std::vector<std::string>& header,
                           const std::string& title, bool loglog) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set title '" << title << "'\n"
      << "set xlabel '" << (header.empty() ? "" : header.front()) << "'\n";
  if (loglog) out << "set logscale xy\n";
  out << "plot ";
  for (std::size_t c = 2; c <= header.size(); ++c) {
    if (c > 2) out << ", \\\n     ";
    out << "'" << csv_name << "' using 1:" << c << " with linespoints";
  }
  out << "\n";
  return out.str();
}

}  // namespace wrcosim
