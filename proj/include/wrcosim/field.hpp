#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wrcosim/netlist.hpp"
#include "wrcosim/newton.hpp"
#include "wrcosim/waveform.hpp"

namespace wrcosim {

/// Partial derivatives of chi and g at one point.
struct FieldJacobian {
  Eigen::MatrixXd chi_x;
  Eigen::VectorXd chi_v;
  Eigen::VectorXd chi_i;
  Eigen::RowVectorXd g_x;
  double g_v = 0.0;
  double g_i = 0.0;
};

/// Current-driven field element in generalized-capacitance form
///
///   x' = chi(x, i, v, t) + R_chi(i) i'
///   v' = g(x, i, v, t)
///
/// with input current i and terminal voltage v. g has no access to i' by
/// signature, which is what makes the voltage robust to a rough current.
class FieldModel {
 public:
  virtual ~FieldModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual Eigen::VectorXd chi(const Eigen::VectorXd& x, double i, double v, double t) const = 0;
  virtual Eigen::VectorXd r_chi(double i) const = 0;
  virtual double g(const Eigen::VectorXd& x, double i, double v, double t) const = 0;

  /// Central differences unless overridden.
  virtual FieldJacobian jacobian(const Eigen::VectorXd& x, double i, double v, double t) const;
  virtual Eigen::VectorXd r_chi_derivative(double i) const;

  virtual std::vector<std::string> state_names() const;
};

class LumpedCapacitor final : public FieldModel {
 public:
  explicit LumpedCapacitor(double capacitance);

  std::size_t state_dim() const override { return 0; }
  Eigen::VectorXd chi(const Eigen::VectorXd&, double, double, double) const override;
  Eigen::VectorXd r_chi(double) const override;
  double g(const Eigen::VectorXd& x, double i, double v, double t) const override;
  FieldJacobian jacobian(const Eigen::VectorXd& x, double i, double v, double t) const override;
  Eigen::VectorXd r_chi_derivative(double) const override;

  double capacitance() const { return capacitance_; }

 private:
  double capacitance_;
};

/// Chain of N+1 parallel conductive-capacitive segments from the terminal
/// node through N internal nodes to ground. Each segment carries (N+1) times
/// the total capacitance and conductance, so the series totals are Ctotal
/// and Gtotal. Unknown ordering is [v; x].
class LadderModel final : public FieldModel {
 public:
  LadderModel(std::size_t internal_nodes, double total_capacitance, double total_conductance);

  std::size_t state_dim() const override { return internal_nodes_; }
  Eigen::VectorXd chi(const Eigen::VectorXd& x, double i, double v, double t) const override;
  Eigen::VectorXd r_chi(double) const override;
  double g(const Eigen::VectorXd& x, double i, double v, double t) const override;
  FieldJacobian jacobian(const Eigen::VectorXd& x, double i, double v, double t) const override;
  Eigen::VectorXd r_chi_derivative(double) const override;

  const Eigen::MatrixXd& cap_matrix() const { return cap_; }
  const Eigen::MatrixXd& cond_matrix() const { return cond_; }

 private:
  Eigen::VectorXd rate(const Eigen::VectorXd& x, double i, double v) const;

  std::size_t internal_nodes_;
  Eigen::MatrixXd cap_;
  Eigen::MatrixXd cond_;
  Eigen::MatrixXd system_;  // -cap^-1 cond
  Eigen::VectorXd input_;   // cap^-1 e0
};

std::shared_ptr<const FieldModel> lumped_cap(double capacitance);
std::shared_ptr<const FieldModel> ladder(std::size_t internal_nodes, double total_capacitance,
                                         double total_conductance);
std::shared_ptr<const FieldModel> make_field_model(const FieldSpec& spec);

struct FieldState {
  Eigen::VectorXd x;
  double v = 0.0;
  double t = 0.0;
};

FieldState zero_field_state(const FieldModel& model, double t0 = 0.0);

/// Implicit-Euler residual of one field step from (x0, v0) to (x1, v1) with
/// input current i0 -> i1; rows are [x; v]. The i' term uses the step's
/// slope (i1 - i0) / dt.
void field_step_residual(const FieldModel& model, const Eigen::VectorXd& x0, double v0,
                         double i0, double i1, double t1, double dt,
                         const Eigen::VectorXd& x1, double v1, Eigen::Ref<Eigen::VectorXd> r);

/// Derivative of field_step_residual: columns [x1, v1] into `state` and the
/// i1 column into `current`.
void field_step_jacobian(const FieldModel& model, double i0, double i1, double t1, double dt,
                         const Eigen::VectorXd& x1, double v1,
                         Eigen::Ref<Eigen::MatrixXd> state, Eigen::Ref<Eigen::VectorXd> current);

struct FieldWindowResult {
  Waveform v;
  FieldState final_state;
};

/// Integrates the field over `grid` driven by `current` (piecewise linear).
/// Throws SolverError carrying the failing step index.
FieldWindowResult field_solve_window(const FieldModel& model, const FieldState& initial,
                                     const Waveform& current, const TimeGrid& grid,
                                     const NewtonSettings& newton = {});

}  // namespace wrcosim
