#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wrcosim/circuit.hpp"
#include "wrcosim/field.hpp"
#include "wrcosim/newton.hpp"
#include "wrcosim/oracle.hpp"
#include "wrcosim/waveform.hpp"

namespace wrcosim {

enum class Scheme { Jacobi, GaussSeidel };
enum class Verdict { Converged, MaxIterations, Diverged };

std::string to_string(Scheme s);
std::string to_string(Verdict v);

struct WrConfig {
  Scheme scheme = Scheme::GaussSeidel;
  double window = 0.5;  // H, seconds
  double dt = 1e-3;
  int max_iterations = 8;
  /// Threshold on |v_k - v_{k-1}|_inf + |i_k - i_{k-1}|_inf.
  double tol = 1e-8;
  double divergence_factor = 1e6;
  double t_end = 5.0;
  /// Jacobi sweeps run both subsystem solves concurrently when > 1.
  int threads = 1;
  /// When false, divergence is still classified but iteration continues to
  /// max_iterations (used to record every iterate).
  bool abort_on_divergence = true;
  NewtonSettings newton;

  /// Throws std::invalid_argument unless 0 < dt <= H <= t_end, tol > 0 and
  /// max_iterations >= 1.
  void validate() const;
};

struct WindowReport {
  std::size_t index = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  /// e_k = |v_k - v_{k-1}| + |i_k - i_{k-1}| for k = 1..iterations.
  std::vector<double> errors;
  std::vector<double> v_errors;
  std::vector<double> i_errors;
  bool converged = false;
  int iterations = 0;
  Verdict verdict = Verdict::MaxIterations;
};

struct Rates {
  double rho = 0.0;           // geometric mean of e_{k+1} / e_k over the tail
  double two_step_rho = 0.0;  // geometric mean of e_{k+2} / e_k over the tail
};

struct WrReport {
  std::vector<WindowReport> windows;
  Verdict verdict = Verdict::Converged;
  std::optional<Rates> rates;
  std::optional<std::size_t> failed_window;

  std::string to_json(Scheme scheme, double window, double dt) const;
};

/// Divergence rule: error above divergence_factor * e_1, a non-finite error,
/// three consecutive increases counted from k = 3 on, or three consecutive
/// two-step increases e_k > e_{k-2}.
bool is_diverging(const std::vector<double>& errors, double divergence_factor);

struct WindowResult {
  Waveform v;
  Waveform i;
  FieldState field_final;
  CircuitState circuit_final;
  std::vector<CircuitState> trajectory;
  std::vector<Waveform> v_iterates;  // v_k, k = 1..iterations
  WindowReport report;
};

/// Waveform relaxation on one window. The k = 0 iterate is the constant pair
/// (v_guess, i_guess). Gauss-Seidel solves the field with i_{k-1} and then the
/// circuit with the fresh v_k; Jacobi feeds both from iteration k-1.
WindowResult wr_window(const FieldModel& field, const MnaSystem& mna, const CoupledState& initial,
                       const TimeGrid& grid, double v_guess, double i_guess, const WrConfig& cfg,
                       std::size_t index = 0);

/// Same with arbitrary k = 0 waveforms sampled on `grid`.
WindowResult wr_window(const FieldModel& field, const MnaSystem& mna, const CoupledState& initial,
                       const TimeGrid& grid, Waveform v_guess, Waveform i_guess, const WrConfig& cfg,
                       std::size_t index = 0);

struct WrResult {
  TimeGrid grid;
  Waveform v;
  Waveform i;
  std::vector<CircuitState> trajectory;
  std::vector<FieldState> field_final_states;
  std::vector<std::vector<Waveform>> v_iterates;  // per window
  WrReport report;
};

/// Splits [0, t_end] into ceil(t_end / H) windows on one uniform grid (window
/// boundaries snap to grid points) and relaxes them in sequence, chaining
/// final states and constant-extrapolated initial guesses. Stops at the first
/// diverging window when abort_on_divergence is set.
WrResult wr_solve(const CoupledSystem& coupled, const WrConfig& cfg);

/// Grid indices of window boundaries for wr_solve.
std::vector<std::size_t> window_boundaries(const TimeGrid& grid, double window);

/// Pools tail ratios over every window with at least four errors. The tail is
/// the last half of a window's error sequence plus one leading entry. Throws
/// std::invalid_argument when no window qualifies.
Rates estimate_rates(const WrReport& report);
Rates estimate_rates(const std::vector<double>& errors);

/// CSV `t,v_f_k1,...,v_f_kK` over the whole horizon, K the largest
/// iteration count of any window; a window that stopped earlier repeats its
/// last iterate in the remaining columns.
std::string iterates_csv(const WrResult& result);

}  // namespace wrcosim
