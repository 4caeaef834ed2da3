#include "wrcosim/cosim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "wrcosim/csv.hpp"

namespace wrcosim {

std::string to_string(Scheme s) { return s == Scheme::Jacobi ? "jacobi" : "gauss-seidel"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::MaxIterations: return "MaxIterations";
    case Verdict::Diverged: return "Diverged";
  }
  return "?";
}

void WrConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(window >= dt)) throw std::invalid_argument("window H must be at least dt");
  if (!(t_end >= window)) throw std::invalid_argument("t_end must be at least the window H");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(divergence_factor > 1.0)) throw std::invalid_argument("divergence factor must exceed 1");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

bool is_diverging(const std::vector<double>& errors, double divergence_factor) {
  if (errors.empty()) return false;
  if (!std::isfinite(errors.back())) return true;
  if (errors.back() > divergence_factor * errors.front()) return true;
  // errors[k - 1] holds e_k; increases are counted from e_3 > e_2 on.
  int streak = 0;
  for (std::size_t k = 3; k <= errors.size(); ++k) {
    streak = errors[k - 1] > errors[k - 2] ? streak + 1 : 0;
    if (streak >= 3) return true;
  }
  // Jacobi errors alternate between the v- and i-driven half sequences, so
  // growth shows up as e_k > e_{k-2}.
  streak = 0;
  for (std::size_t k = 4; k <= errors.size(); ++k) {
    streak = errors[k - 1] > errors[k - 3] ? streak + 1 : 0;
    if (streak >= 3) return true;
  }
  return false;
}

WindowResult wr_window(const FieldModel& field, const MnaSystem& mna, const CoupledState& initial,
                       const TimeGrid& grid, double v_guess, double i_guess, const WrConfig& cfg,
                       std::size_t index) {
  return wr_window(field, mna, initial, grid, Waveform::constant(grid, v_guess),
                   Waveform::constant(grid, i_guess), cfg, index);
}

WindowResult wr_window(const FieldModel& field, const MnaSystem& mna, const CoupledState& initial,
                       const TimeGrid& grid, Waveform v_prev, Waveform i_prev, const WrConfig& cfg,
                       std::size_t index) {
  WindowReport report;
  report.index = index;
  report.t0 = grid.front();
  report.t1 = grid.back();

  std::vector<Waveform> v_iterates;
  std::optional<FieldWindowResult> field_out;
  std::optional<CircuitWindowResult> circuit_out;

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    if (cfg.scheme == Scheme::GaussSeidel) {
      field_out = field_solve_window(field, initial.field, i_prev, grid, cfg.newton);
      circuit_out = circuit_solve_window(mna, initial.circuit, field_out->v, grid, cfg.newton);
    } else if (cfg.threads > 1) {
      auto field_job = std::async(std::launch::async, [&] {
        return field_solve_window(field, initial.field, i_prev, grid, cfg.newton);
      });
      circuit_out = circuit_solve_window(mna, initial.circuit, v_prev, grid, cfg.newton);
      field_out = field_job.get();
    } else {
      field_out = field_solve_window(field, initial.field, i_prev, grid, cfg.newton);
      circuit_out = circuit_solve_window(mna, initial.circuit, v_prev, grid, cfg.newton);
    }

    const double ev = max_abs_diff(field_out->v, v_prev);
    const double ei = max_abs_diff(circuit_out->current, i_prev);
    report.v_errors.push_back(ev);
    report.i_errors.push_back(ei);
    report.errors.push_back(ev + ei);
    report.iterations = k;
    v_iterates.push_back(field_out->v);
    v_prev = field_out->v;
    i_prev = circuit_out->current;

    if (report.errors.back() <= cfg.tol) {
      report.converged = true;
      report.verdict = Verdict::Converged;
      break;
    }
    if (is_diverging(report.errors, cfg.divergence_factor)) {
      report.verdict = Verdict::Diverged;
      if (cfg.abort_on_divergence || !std::isfinite(report.errors.back())) break;
    }
  }
  if (!report.converged && report.verdict != Verdict::Diverged)
    report.verdict = Verdict::MaxIterations;

  FieldState field_final = field_out->final_state;
  CircuitState circuit_final = circuit_out->trajectory.back();
  return {std::move(v_prev),      std::move(i_prev),           std::move(field_final),
          std::move(circuit_final), std::move(circuit_out->trajectory), std::move(v_iterates),
          std::move(report)};
}

std::vector<std::size_t> window_boundaries(const TimeGrid& grid, double window) {
  const double span = grid.back() - grid.front();
  const std::size_t steps = grid.steps();
  const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(span / window - 1e-9)));
  std::vector<std::size_t> bounds{0};
  for (std::size_t j = 1; j < count; ++j) {
    const auto b = static_cast<std::size_t>(
        std::llround(static_cast<double>(j) * window / span * static_cast<double>(steps)));
    if (b > bounds.back() && b < steps) bounds.push_back(b);
  }
  bounds.push_back(steps);
  return bounds;
}

WrResult wr_solve(const CoupledSystem& coupled, const WrConfig& cfg) {
  cfg.validate();
  CoupledState state = consistent_start(coupled, 0.0);
  const TimeGrid grid = TimeGrid::uniform(0.0, cfg.t_end, cfg.dt);
  const auto bounds = window_boundaries(grid, cfg.window);

  WrResult result{grid, Waveform::constant(grid, 0.0), Waveform::constant(grid, 0.0), {}, {}, {}, {}};
  std::vector<Waveform> v_pieces;
  std::vector<Waveform> i_pieces;
  double v_guess = 0.0;
  double i_guess = 0.0;
  bool all_converged = true;

  for (std::size_t w = 0; w + 1 < bounds.size(); ++w) {
    const TimeGrid window_grid = grid.slice(bounds[w], bounds[w + 1]);
    std::optional<WindowResult> solved;
    try {
      solved = wr_window(*coupled.field, coupled.mna, state, window_grid, v_guess, i_guess, cfg, w);
    } catch (const SolverError& ex) {
      throw SolverError(ex.step(), ex.residual(), "window " + std::to_string(w) + ": " + ex.what());
    }
    WindowResult& out = *solved;
    const bool diverged = out.report.verdict == Verdict::Diverged;
    all_converged = all_converged && out.report.converged;

    const std::size_t skip = result.trajectory.empty() ? 0 : 1;
    result.trajectory.insert(result.trajectory.end(),
                             out.trajectory.begin() + static_cast<std::ptrdiff_t>(skip),
                             out.trajectory.end());
    result.field_final_states.push_back(out.field_final);
    v_pieces.push_back(out.v);
    i_pieces.push_back(out.i);
    result.v_iterates.push_back(std::move(out.v_iterates));
    result.report.windows.push_back(out.report);

    v_guess = out.v.back();
    i_guess = out.i.back();
    state.field = out.field_final;
    state.circuit = out.circuit_final;

    if (diverged) {
      result.report.verdict = Verdict::Diverged;
      result.report.failed_window = w;
      if (cfg.abort_on_divergence) break;
    }
  }

  result.v = concatenate(v_pieces);
  result.i = concatenate(i_pieces);
  if (result.report.verdict != Verdict::Diverged)
    result.report.verdict = all_converged ? Verdict::Converged : Verdict::MaxIterations;
  try {
    result.report.rates = estimate_rates(result.report);
  } catch (const std::invalid_argument&) {
    result.report.rates.reset();
  }
  return result;
}

namespace {

struct RatioAccumulator {
  double one_step_log = 0.0;
  std::size_t one_step_count = 0;
  double two_step_log = 0.0;
  std::size_t two_step_count = 0;

  void add(const std::vector<double>& errors) {
    const std::size_t n = errors.size();
    const std::size_t start = n / 2 >= 1 ? n / 2 - 1 : 0;
    for (std::size_t k = start; k + 1 < n; ++k)
      if (errors[k] > 0.0 && errors[k + 1] > 0.0) {
        one_step_log += std::log(errors[k + 1] / errors[k]);
        ++one_step_count;
      }
    for (std::size_t k = start; k + 2 < n; ++k)
      if (errors[k] > 0.0 && errors[k + 2] > 0.0) {
        two_step_log += std::log(errors[k + 2] / errors[k]);
        ++two_step_count;
      }
  }

  Rates rates() const {
    if (one_step_count == 0 || two_step_count == 0)
      throw std::invalid_argument("insufficient iterations to estimate rates");
    return {std::exp(one_step_log / static_cast<double>(one_step_count)),
            std::exp(two_step_log / static_cast<double>(two_step_count))};
  }
};

}  // namespace

Rates estimate_rates(const std::vector<double>& errors) {
  if (errors.size() < 4) throw std::invalid_argument("insufficient iterations to estimate rates");
  RatioAccumulator acc;
  acc.add(errors);
  return acc.rates();
}

Rates estimate_rates(const WrReport& report) {
  RatioAccumulator acc;
  for (const auto& w : report.windows)
    if (w.errors.size() >= 4) acc.add(w.errors);
  return acc.rates();
}

std::string WrReport::to_json(Scheme scheme, double window, double dt) const {
  nlohmann::ordered_json j;
  j["scheme"] = to_string(scheme);
  j["H"] = window;
  j["dt"] = dt;
  j["verdict"] = to_string(verdict);
  if (failed_window) j["failed_window"] = *failed_window;
  else j["failed_window"] = nullptr;
  if (rates) {
    j["rates"] = {{"rho", rates->rho}, {"two_step_rho", rates->two_step_rho}};
  } else {
    j["rates"] = nullptr;
  }
  auto& arr = j["windows"] = nlohmann::ordered_json::array();
  for (const auto& w : windows) {
    nlohmann::ordered_json jw;
    jw["index"] = w.index;
    jw["t0"] = w.t0;
    jw["t1"] = w.t1;
    jw["iterations"] = w.iterations;
    jw["converged"] = w.converged;
    jw["verdict"] = to_string(w.verdict);
    jw["errors"] = w.errors;
    jw["v_errors"] = w.v_errors;
    jw["i_errors"] = w.i_errors;
    arr.push_back(std::move(jw));
  }
  return j.dump(2);
}

std::string iterates_csv(const WrResult& result) {
  std::size_t columns = 0;
  for (const auto& w : result.v_iterates) columns = std::max(columns, w.size());
  std::vector<std::string> header{"t"};
  for (std::size_t k = 1; k <= columns; ++k) header.push_back("v_f_k" + std::to_string(k));
  CsvTable table(header);
  std::vector<double> row(header.size());
  for (std::size_t w = 0; w < result.v_iterates.size(); ++w) {
    const auto& iterates = result.v_iterates[w];
    if (iterates.empty()) continue;
    const auto& grid = iterates.front().grid();
    for (std::size_t n = w == 0 ? 0 : 1; n < grid.size(); ++n) {
      row[0] = grid[n];
      for (std::size_t k = 0; k < columns; ++k)
        row[k + 1] = iterates[std::min(k, iterates.size() - 1)][n];
      table.add_row(row);
    }
  }
  return table.str();
}

}  // namespace wrcosim
