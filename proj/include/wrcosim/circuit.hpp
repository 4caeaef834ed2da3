#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrcosim/netlist.hpp"
#include "wrcosim/newton.hpp"
#include "wrcosim/waveform.hpp"

namespace wrcosim {

/// Modified nodal analysis of a circuit whose Field element is replaced by
/// an imposed-voltage branch.
///
/// Unknown layout z = [e; i_L; i_V; i], with e the non-ground node
/// potentials, i_L and i_V the inductor and voltage-source branch currents
/// and i the coupling current flowing from the circuit into the field's
/// n+ terminal. The system reads
///
///   E z' + f(t, z) = b v,   b = unit vector on the coupling row,
///
/// where the KCL rows contain A_f i and the coupling row is P^T z = A_f^T e.
class MnaSystem {
 public:
  explicit MnaSystem(const CircuitGraph& graph);

  std::size_t dim() const { return dim_; }
  std::size_t num_potentials() const { return nodes_; }
  std::size_t num_inductors() const { return inductors_.size(); }
  std::size_t num_vsources() const { return vsources_.size(); }
  Eigen::Index coupling_index() const { return static_cast<Eigen::Index>(dim_ - 1); }
  Eigen::Index inductor_index(std::size_t k) const {
    return static_cast<Eigen::Index>(nodes_ + k);
  }
  Eigen::Index vsource_index(std::size_t k) const {
    return static_cast<Eigen::Index>(nodes_ + inductors_.size() + k);
  }

  /// Names of every entry but the coupling current (e1.., i_<L>.., i_<V>..).
  const std::vector<std::string>& state_names() const { return names_; }

  const Eigen::MatrixXd& E(const Eigen::VectorXd& z) const;
  Eigen::VectorXd f(double t, const Eigen::VectorXd& z) const;
  Eigen::MatrixXd df_dz(double t, const Eigen::VectorXd& z) const;

  /// Extracts the field terminal voltage: P^T z = e(n+) - e(n-).
  const Eigen::VectorXd& P() const { return p_; }

  /// Sources evaluated at t, for consistency checks.
  std::vector<double> vsource_values(double t) const;
  std::vector<double> isource_values(double t) const;

 private:
  struct Branch {
    std::string name;
    int plus;
    int minus;
    double value;
  };
  struct SourceBranch {
    std::string name;
    int plus;
    int minus;
    SourceSpec spec;
  };
  struct DiodeBranch {
    int plus;
    int minus;
    DiodeParams params;
  };

  double potential(const Eigen::VectorXd& z, int node) const {
    return node == 0 ? 0.0 : z[node - 1];
  }

  std::size_t nodes_;
  std::size_t dim_;
  std::vector<Branch> resistors_;
  std::vector<Branch> capacitors_;
  std::vector<Branch> inductors_;
  std::vector<SourceBranch> vsources_;
  std::vector<SourceBranch> isources_;
  std::vector<DiodeBranch> diodes_;
  int field_plus_ = 0;
  int field_minus_ = 0;
  Eigen::MatrixXd e_;
  Eigen::MatrixXd linear_jacobian_;
  Eigen::VectorXd p_;
  std::vector<std::string> names_;
};

/// Stamps the MNA system. Throws std::invalid_argument when the graph has no
/// Field element or when a node only reaches ground through current sources.
MnaSystem assemble_mna(const CircuitGraph& graph);

struct CircuitState {
  Eigen::VectorXd z;
  double t = 0.0;
};

CircuitState zero_circuit_state(const MnaSystem& sys, double t0 = 0.0);

/// Implicit-Euler residual E (z1 - z0) / dt + f(t1, z1) - b v1.
void circuit_step_residual(const MnaSystem& sys, const Eigen::VectorXd& z0, double t1, double dt,
                           const Eigen::VectorXd& z1, double v1, Eigen::Ref<Eigen::VectorXd> r);
Eigen::MatrixXd circuit_step_jacobian(const MnaSystem& sys, double t1, double dt,
                                      const Eigen::VectorXd& z1);

/// Largest KCL imbalance (amperes) of an implicit-Euler step.
double kcl_residual(const MnaSystem& sys, const Eigen::VectorXd& z0, double t1, double dt,
                    const Eigen::VectorXd& z1);

struct CircuitWindowResult {
  Waveform current;
  std::vector<CircuitState> trajectory;
};

/// Integrates the circuit over `grid` with the coupling voltage imposed by
/// `voltage`; returns the coupling current and all states.
CircuitWindowResult circuit_solve_window(const MnaSystem& sys, const CircuitState& initial,
                                         const Waveform& voltage, const TimeGrid& grid,
                                         const NewtonSettings& newton = {});

struct PerturbationGain {
  double nu_hat = 0.0;
  double max_response = 0.0;  // max_t |delta (z, i)(t)|
  double max_delta = 0.0;     // max_t |delta(t)|
};

/// Empirical gain of the state response to a perturbation of the imposed
/// voltage: sup-norm response divided by max(sup-norm perturbation, 1e-14).
PerturbationGain perturbed_response(const MnaSystem& sys, const CircuitState& initial,
                                    const Waveform& voltage, const Waveform& delta,
                                    const TimeGrid& grid, const NewtonSettings& newton = {});

/// CSV with header `t,<z names>,i_coupling`.
std::string trajectory_csv(const MnaSystem& sys, const std::vector<CircuitState>& trajectory);

}  // namespace wrcosim
