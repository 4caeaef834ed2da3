#include "wrcosim/field.hpp"

#include <cmath>
#include <stdexcept>

namespace wrcosim {

namespace {

double fd_step(double at) { return 1e-6 * std::max(1.0, std::abs(at)); }

}  // namespace

FieldJacobian FieldModel::jacobian(const Eigen::VectorXd& x, double i, double v, double t) const {
  const auto n = static_cast<Eigen::Index>(state_dim());
  FieldJacobian jac;
  jac.chi_x.resize(n, n);
  jac.g_x.resize(n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double h = fd_step(x[k]);
    xp[k] = x[k] + h;
    const Eigen::VectorXd cp = chi(xp, i, v, t);
    const double gp = g(xp, i, v, t);
    xp[k] = x[k] - h;
    const Eigen::VectorXd cm = chi(xp, i, v, t);
    const double gm = g(xp, i, v, t);
    xp[k] = x[k];
    jac.chi_x.col(k) = (cp - cm) / (2.0 * h);
    jac.g_x[k] = (gp - gm) / (2.0 * h);
  }
  const double hv = fd_step(v);
  jac.chi_v = (chi(x, i, v + hv, t) - chi(x, i, v - hv, t)) / (2.0 * hv);
  jac.g_v = (g(x, i, v + hv, t) - g(x, i, v - hv, t)) / (2.0 * hv);
  const double hi = fd_step(i);
  jac.chi_i = (chi(x, i + hi, v, t) - chi(x, i - hi, v, t)) / (2.0 * hi);
  jac.g_i = (g(x, i + hi, v, t) - g(x, i - hi, v, t)) / (2.0 * hi);
  return jac;
}

Eigen::VectorXd FieldModel::r_chi_derivative(double i) const {
  const double h = fd_step(i);
  return (r_chi(i + h) - r_chi(i - h)) / (2.0 * h);
}

std::vector<std::string> FieldModel::state_names() const {
  std::vector<std::string> names;
  for (std::size_t k = 1; k <= state_dim(); ++k) names.push_back("x" + std::to_string(k));
  return names;
}

LumpedCapacitor::LumpedCapacitor(double capacitance) : capacitance_(capacitance) {
  if (!(capacitance > 0.0) || !std::isfinite(capacitance))
    throw std::invalid_argument("lumped capacitance must be positive");
}

Eigen::VectorXd LumpedCapacitor::chi(const Eigen::VectorXd&, double, double, double) const {
  return Eigen::VectorXd(0);
}

Eigen::VectorXd LumpedCapacitor::r_chi(double) const { return Eigen::VectorXd(0); }

double LumpedCapacitor::g(const Eigen::VectorXd&, double i, double, double) const {
  return i / capacitance_;
}

FieldJacobian LumpedCapacitor::jacobian(const Eigen::VectorXd&, double, double, double) const {
  FieldJacobian jac;
  jac.chi_x.resize(0, 0);
  jac.chi_v.resize(0);
  jac.chi_i.resize(0);
  jac.g_x.resize(0);
  jac.g_v = 0.0;
  jac.g_i = 1.0 / capacitance_;
  return jac;
}

Eigen::VectorXd LumpedCapacitor::r_chi_derivative(double) const { return Eigen::VectorXd(0); }

LadderModel::LadderModel(std::size_t internal_nodes, double total_capacitance,
                         double total_conductance)
    : internal_nodes_(internal_nodes) {
  if (internal_nodes < 1) throw std::invalid_argument("ladder needs at least one internal node");
  if (!(total_capacitance > 0.0) || !std::isfinite(total_capacitance))
    throw std::invalid_argument("ladder capacitance must be positive");
  if (!(total_conductance >= 0.0) || !std::isfinite(total_conductance))
    throw std::invalid_argument("ladder conductance must be non-negative");

  const auto n = static_cast<Eigen::Index>(internal_nodes + 1);
  const double segments = static_cast<double>(n);
  const double c_seg = segments * total_capacitance;
  const double g_seg = segments * total_conductance;

  // Reduced Laplacian of the chain terminal - 1 - ... - N - ground.
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    laplacian(k, k) = k == 0 ? 1.0 : 2.0;
    if (k + 1 < n) laplacian(k, k + 1) = laplacian(k + 1, k) = -1.0;
  }
  cap_ = c_seg * laplacian;
  cond_ = g_seg * laplacian;

  Eigen::LLT<Eigen::MatrixXd> llt(cap_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("ladder capacitance matrix is not positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cond_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, cond_.norm()))
    throw std::invalid_argument("ladder conductance matrix is not positive semidefinite");

  system_ = -llt.solve(cond_);
  input_ = llt.solve(Eigen::VectorXd::Unit(n, 0));
}

Eigen::VectorXd LadderModel::rate(const Eigen::VectorXd& x, double i, double v) const {
  Eigen::VectorXd state(x.size() + 1);
  state[0] = v;
  state.tail(x.size()) = x;
  return system_ * state + input_ * i;
}

Eigen::VectorXd LadderModel::chi(const Eigen::VectorXd& x, double i, double v, double) const {
  return rate(x, i, v).tail(x.size());
}

Eigen::VectorXd LadderModel::r_chi(double) const {
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(internal_nodes_));
}

double LadderModel::g(const Eigen::VectorXd& x, double i, double v, double) const {
  return rate(x, i, v)[0];
}

FieldJacobian LadderModel::jacobian(const Eigen::VectorXd&, double, double, double) const {
  const auto n = static_cast<Eigen::Index>(internal_nodes_);
  FieldJacobian jac;
  jac.chi_x = system_.bottomRightCorner(n, n);
  jac.chi_v = system_.col(0).tail(n);
  jac.chi_i = input_.tail(n);
  jac.g_x = system_.row(0).tail(n);
  jac.g_v = system_(0, 0);
  jac.g_i = input_[0];
  return jac;
}

Eigen::VectorXd LadderModel::r_chi_derivative(double) const {
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(internal_nodes_));
}

std::shared_ptr<const FieldModel> lumped_cap(double capacitance) {
  return std::make_shared<LumpedCapacitor>(capacitance);
}

std::shared_ptr<const FieldModel> ladder(std::size_t internal_nodes, double total_capacitance,
                                         double total_conductance) {
  return std::make_shared<LadderModel>(internal_nodes, total_capacitance, total_conductance);
}

std::shared_ptr<const FieldModel> make_field_model(const FieldSpec& spec) {
  if (spec.model == FieldSpec::Model::Lumped) return lumped_cap(spec.capacitance);
  return ladder(spec.segments, spec.capacitance, spec.conductance);
}

FieldState zero_field_state(const FieldModel& model, double t0) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.state_dim())), 0.0, t0};
}

void field_step_residual(const FieldModel& model, const Eigen::VectorXd& x0, double v0,
                         double i0, double i1, double t1, double dt,
                         const Eigen::VectorXd& x1, double v1, Eigen::Ref<Eigen::VectorXd> r) {
  const auto n = x1.size();
  if (n > 0) {
    r.head(n) = x1 - x0 - dt * model.chi(x1, i1, v1, t1) - model.r_chi(i1) * (i1 - i0);
  }
  r[n] = v1 - v0 - dt * model.g(x1, i1, v1, t1);
}

void field_step_jacobian(const FieldModel& model, double i0, double i1, double t1, double dt,
                         const Eigen::VectorXd& x1, double v1,
                         Eigen::Ref<Eigen::MatrixXd> state, Eigen::Ref<Eigen::VectorXd> current) {
  const auto n = x1.size();
  const FieldJacobian jac = model.jacobian(x1, i1, v1, t1);
  if (n > 0) {
    state.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) - dt * jac.chi_x;
    state.col(n).head(n) = -dt * jac.chi_v;
    state.row(n).head(n) = -dt * jac.g_x;
    current.head(n) =
        -dt * jac.chi_i - model.r_chi_derivative(i1) * (i1 - i0) - model.r_chi(i1);
  }
  state(n, n) = 1.0 - dt * jac.g_v;
  current[n] = -dt * jac.g_i;
}

FieldWindowResult field_solve_window(const FieldModel& model, const FieldState& initial,
                                     const Waveform& current, const TimeGrid& grid,
                                     const NewtonSettings& newton) {
  const auto n = static_cast<Eigen::Index>(model.state_dim());
  if (initial.x.size() != n) throw std::invalid_argument("field state has wrong dimension");
  std::vector<double> v(grid.size());
  v[0] = initial.v;
  Eigen::VectorXd x = initial.x;
  Eigen::VectorXd w(n + 1);
  Eigen::VectorXd unused_current(n + 1);
  double i_prev = current.at(grid[0]);
  for (std::size_t step = 1; step < grid.size(); ++step) {
    const double t1 = grid[step];
    const double dt = t1 - grid[step - 1];
    const double i1 = current.at(t1);
    const Eigen::VectorXd x0 = x;
    const double v0 = v[step - 1];
    w.head(n) = x0;
    w[n] = v0;
    auto res = [&](const Eigen::VectorXd& s, Eigen::VectorXd& r) {
      field_step_residual(model, x0, v0, i_prev, i1, t1, dt, s.head(n), s[n], r);
    };
    auto jac = [&](const Eigen::VectorXd& s, Eigen::MatrixXd& j) {
      field_step_jacobian(model, i_prev, i1, t1, dt, s.head(n), s[n], j, unused_current);
    };
    newton_solve(res, jac, w, newton, step);
    x = w.head(n);
    v[step] = w[n];
    i_prev = i1;
  }
  FieldState final_state{x, v.back(), grid.back()};
  return {Waveform(grid, std::move(v)), std::move(final_state)};
}

}  // namespace wrcosim
