#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrcosim/circuit.hpp"
#include "wrcosim/field.hpp"
#include "wrcosim/netlist.hpp"
#include "wrcosim/newton.hpp"
#include "wrcosim/waveform.hpp"

namespace wrcosim {

/// Circuit plus field, solved simultaneously. Unknown ordering of the
/// monolithic system is [z; x; v] (z already carries the coupling current).
struct CoupledSystem {
  MnaSystem mna;
  std::shared_ptr<const FieldModel> field;

  std::size_t dim() const { return mna.dim() + field->state_dim() + 1; }
};

CoupledSystem make_coupled_system(const CircuitGraph& graph);

struct CoupledState {
  CircuitState circuit;
  FieldState field;
};

class InconsistentStartError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest violation of the algebraic constraints (left null space of the
/// descriptor matrix applied to the residual) at time t.
double constraint_residual(const CoupledSystem& coupled, const CoupledState& state, double t);

/// Accepts `state` if constraint_residual <= tol, otherwise throws
/// InconsistentStartError.
void verify_consistent(const CoupledSystem& coupled, const CoupledState& state, double t,
                       double tol = 1e-12);

/// The all-zero state, which is consistent exactly when every independent
/// source vanishes at t0. Throws InconsistentStartError naming the first
/// offending source otherwise.
CoupledState consistent_start(const CoupledSystem& coupled, double t0 = 0.0);

struct MonolithicResult {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> z;
  std::vector<Eigen::VectorXd> x;
  Waveform v;
  Waveform i;
  double max_coupling_residual = 0.0;  // max_n |P^T z_n - v_n|
  double max_kcl_residual = 0.0;
};

/// Implicit Euler + Newton on the coupled system over [0, t_end] from the
/// consistent zero start.
MonolithicResult monolithic_solve(const CoupledSystem& coupled, double dt, double t_end,
                                  const NewtonSettings& newton = {});

/// Same, on an explicit grid and from a given state.
MonolithicResult monolithic_solve(const CoupledSystem& coupled, const CoupledState& initial,
                                  const TimeGrid& grid, const NewtonSettings& newton = {});

/// CSV with header `t,v_mono,<z names>,<x names>,i`.
std::string monolithic_csv(const CoupledSystem& coupled, const MonolithicResult& result);

}  // namespace wrcosim
