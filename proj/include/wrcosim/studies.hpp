#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wrcosim/cosim.hpp"
#include "wrcosim/netlist.hpp"
#include "wrcosim/topology.hpp"

namespace wrcosim {

/// Iterates of the first window next to the monolithic reference.
struct IterateStudy {
  TimeGrid grid;
  Waveform v_mono;
  std::vector<Waveform> iterates;     // v_f^k, k = 1..kMax
  std::vector<double> errors_vs_mono;  // max_t |v_f^k - v_mono|
  WindowReport report;
  CvVerdict prediction;
  bool observed_divergence = false;
  bool agrees = false;  // prediction and observation tell the same story

  std::string csv() const;  // t,v_mono,v_f_k1,...
};

/// Runs every one of cfg.max_iterations sweeps on [0, H] (no early abort on
/// divergence, early stop on tol only).
IterateStudy iterate_study(const CircuitGraph& graph, const WrConfig& cfg);

struct SweepRow {
  double H = 0.0;
  double err_v = 0.0;
  double err_i = 0.0;
  int k = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // H strictly decreasing
  std::optional<double> fitted_slope;
  std::vector<std::string> warnings;

  std::string csv() const;  // H,err_v,err_i
};

/// Least-squares slope of log(err) against log(H) over the given rows.
double loglog_slope(const std::vector<SweepRow>& rows);

/// For each H, runs exactly k sweeps per window over [0, cfg.t_end] and
/// measures the error against the monolithic solution on the shared grid.
/// The slope is fitted on the smaller-H half of the rows. Throws
/// std::invalid_argument if HList has fewer than two distinct values or
/// spans less than a decade.
SweepResult order_study(const CircuitGraph& graph, std::vector<double> h_list, int k,
                        const WrConfig& cfg);

enum class DeltaShape { Zero, Smooth, Hat };

std::string to_string(DeltaShape s);
DeltaShape parse_delta_shape(const std::string& name);

struct LemmaRow {
  double dt = 0.0;
  double nu_hat = 0.0;
};

struct LemmaResult {
  DeltaShape shape = DeltaShape::Smooth;
  std::vector<LemmaRow> rows;  // dt strictly decreasing
  std::vector<double> ratios;  // nu_hat(dt_{j+1}) / nu_hat(dt_j)
  bool bounded = true;         // every ratio within [0.8, 1.2]

  std::string csv() const;  // dt,nu_hat
};

/// Perturbation amplitude and the span used by lemma_check.
inline constexpr double kLemmaAmplitude = 1e-3;
inline constexpr double kLemmaSpan = 1.0;

/// Perturbation sampled on `grid`: Smooth is A sin(2 pi t), Hat a triangle of
/// width 2 dt and peak A centred on the grid point nearest the span midpoint.
Waveform lemma_delta(DeltaShape shape, const TimeGrid& grid, double dt);

/// Empirical gain of the circuit state to a perturbation of the coupling
/// voltage for each dt over [0, 1]; the unperturbed input is the monolithic
/// coupling voltage at that dt.
LemmaResult lemma_check(const CircuitGraph& graph, std::vector<double> dt_list,
                        DeltaShape shape = DeltaShape::Smooth);

/// gnuplot script that plots a CSV written next to it. Column 1 is the
/// abscissa; every other column becomes a line.
std::string gnuplot_script(const std::string& csv_name, const std::vector<std::string>& header,
                           const std::string& title, bool loglog);

}  // namespace wrcosim
