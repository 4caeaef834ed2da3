#include "wrcosim/circuit.hpp"

#include "wrcosim/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wrcosim {

namespace {

constexpr double kExpLimit = 80.0;

// exp with a linear continuation past kExpLimit to keep Newton finite.
double limited_exp(double u) {
  if (u <= kExpLimit) return std::exp(u);
  return std::exp(kExpLimit) * (1.0 + (u - kExpLimit));
}

double limited_exp_derivative(double u) { return std::exp(std::min(u, kExpLimit)); }

bool reaches_ground_without_current_sources(const CircuitGraph& graph) {
  std::vector<std::size_t> parent(graph.num_nodes());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& e : graph.elements()) {
    if (e.kind == ElementKind::CurrentSource) continue;
    parent[find(static_cast<std::size_t>(e.node_plus))] = find(static_cast<std::size_t>(e.node_minus));
  }
  for (std::size_t n = 1; n < graph.num_nodes(); ++n)
    if (find(n) != find(0)) return false;
  return true;
}

}  // namespace

MnaSystem::MnaSystem(const CircuitGraph& graph) : nodes_(graph.num_free_nodes()) {
  bool has_field = false;
  for (const auto& el : graph.elements()) {
    switch (el.kind) {
      case ElementKind::Resistor:
        resistors_.push_back({el.name, el.node_plus, el.node_minus, el.value()});
        break;
      case ElementKind::Capacitor:
        capacitors_.push_back({el.name, el.node_plus, el.node_minus, el.value()});
        break;
      case ElementKind::Inductor:
        inductors_.push_back({el.name, el.node_plus, el.node_minus, el.value()});
        break;
      case ElementKind::VoltageSource:
        vsources_.push_back({el.name, el.node_plus, el.node_minus, el.source()});
        break;
      case ElementKind::CurrentSource:
        isources_.push_back({el.name, el.node_plus, el.node_minus, el.source()});
        break;
      case ElementKind::Diode:
        diodes_.push_back({el.node_plus, el.node_minus, el.diode()});
        break;
      case ElementKind::Field:
        has_field = true;
        field_plus_ = el.node_plus;
        field_minus_ = el.node_minus;
        break;
    }
  }
  if (!has_field) throw std::invalid_argument("circuit has no Field element to couple");
  if (!reaches_ground_without_current_sources(graph))
    throw std::invalid_argument("structurally singular: a node set is cut off by current sources");

  dim_ = nodes_ + inductors_.size() + vsources_.size() + 1;
  const auto n = static_cast<Eigen::Index>(dim_);
  const Eigen::Index ic = coupling_index();

  for (std::size_t k = 1; k <= nodes_; ++k) names_.push_back("e" + std::to_string(k));
  for (const auto& l : inductors_) names_.push_back("i_" + l.name);
  for (const auto& v : vsources_) names_.push_back("i_" + v.name);

  auto stamp_pair = [&](Eigen::MatrixXd& m, int a, int b, double value) {
    if (a > 0) m(a - 1, a - 1) += value;
    if (b > 0) m(b - 1, b - 1) += value;
    if (a > 0 && b > 0) {
      m(a - 1, b - 1) -= value;
      m(b - 1, a - 1) -= value;
    }
  };
  // Couples branch current column/row `idx` to the KCL rows of its nodes.
  auto stamp_branch = [&](Eigen::MatrixXd& m, int a, int b, Eigen::Index idx) {
    if (a > 0) m(a - 1, idx) += 1.0;
    if (b > 0) m(b - 1, idx) -= 1.0;
  };

  e_ = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : capacitors_) stamp_pair(e_, c.plus, c.minus, c.value);
  for (std::size_t k = 0; k < inductors_.size(); ++k) {
    const auto idx = inductor_index(k);
    e_(idx, idx) = inductors_[k].value;
  }

  linear_jacobian_ = Eigen::MatrixXd::Zero(n, n);
  for (const auto& r : resistors_) stamp_pair(linear_jacobian_, r.plus, r.minus, 1.0 / r.value);
  for (std::size_t k = 0; k < inductors_.size(); ++k) {
    const auto idx = inductor_index(k);
    const auto& l = inductors_[k];
    stamp_branch(linear_jacobian_, l.plus, l.minus, idx);
    // L i' - (e+ - e-) = 0
    if (l.plus > 0) linear_jacobian_(idx, l.plus - 1) -= 1.0;
    if (l.minus > 0) linear_jacobian_(idx, l.minus - 1) += 1.0;
  }
  for (std::size_t k = 0; k < vsources_.size(); ++k) {
    const auto idx = vsource_index(k);
    const auto& v = vsources_[k];
    stamp_branch(linear_jacobian_, v.plus, v.minus, idx);
    // (e+ - e-) - vs(t) = 0
    if (v.plus > 0) linear_jacobian_(idx, v.plus - 1) += 1.0;
    if (v.minus > 0) linear_jacobian_(idx, v.minus - 1) -= 1.0;
  }
  stamp_branch(linear_jacobian_, field_plus_, field_minus_, ic);
  p_ = Eigen::VectorXd::Zero(n);
  if (field_plus_ > 0) p_[field_plus_ - 1] = 1.0;
  if (field_minus_ > 0) p_[field_minus_ - 1] = -1.0;
  linear_jacobian_.row(ic) = p_.transpose();
}

const Eigen::MatrixXd& MnaSystem::E(const Eigen::VectorXd&) const { return e_; }

Eigen::VectorXd MnaSystem::f(double t, const Eigen::VectorXd& z) const {
  Eigen::VectorXd out = linear_jacobian_ * z;
  for (std::size_t k = 0; k < vsources_.size(); ++k)
    out[vsource_index(k)] -= vsources_[k].spec.value(t);
  for (const auto& src : isources_) {
    const double current = src.spec.value(t);
    if (src.plus > 0) out[src.plus - 1] += current;
    if (src.minus > 0) out[src.minus - 1] -= current;
  }
  for (const auto& d : diodes_) {
    const double vd = potential(z, d.plus) - potential(z, d.minus);
    const double current =
        d.params.saturation_current * (limited_exp(vd / d.params.thermal_voltage) - 1.0);
    if (d.plus > 0) out[d.plus - 1] += current;
    if (d.minus > 0) out[d.minus - 1] -= current;
  }
  return out;
}

Eigen::MatrixXd MnaSystem::df_dz(double, const Eigen::VectorXd& z) const {
  Eigen::MatrixXd j = linear_jacobian_;
  for (const auto& d : diodes_) {
    const double vd = potential(z, d.plus) - potential(z, d.minus);
    const double gd = d.params.saturation_current / d.params.thermal_voltage *
                      limited_exp_derivative(vd / d.params.thermal_voltage);
    if (d.plus > 0) j(d.plus - 1, d.plus - 1) += gd;
    if (d.minus > 0) j(d.minus - 1, d.minus - 1) += gd;
    if (d.plus > 0 && d.minus > 0) {
      j(d.plus - 1, d.minus - 1) -= gd;
      j(d.minus - 1, d.plus - 1) -= gd;
    }
  }
  return j;
}

std::vector<double> MnaSystem::vsource_values(double t) const {
  std::vector<double> out;
  for (const auto& v : vsources_) out.push_back(v.spec.value(t));
  return out;
}

std::vector<double> MnaSystem::isource_values(double t) const {
  std::vector<double> out;
  for (const auto& i : isources_) out.push_back(i.spec.value(t));
  return out;
}

MnaSystem assemble_mna(const CircuitGraph& graph) { return MnaSystem(graph); }

CircuitState zero_circuit_state(const MnaSystem& sys, double t0) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.dim())), t0};
}

void circuit_step_residual(const MnaSystem& sys, const Eigen::VectorXd& z0, double t1, double dt,
                           const Eigen::VectorXd& z1, double v1, Eigen::Ref<Eigen::VectorXd> r) {
  r = sys.E(z1) * (z1 - z0) / dt + sys.f(t1, z1);
  r[sys.coupling_index()] -= v1;
}

Eigen::MatrixXd circuit_step_jacobian(const MnaSystem& sys, double t1, double dt,
                                      const Eigen::VectorXd& z1) {
  return sys.E(z1) / dt + sys.df_dz(t1, z1);
}

double kcl_residual(const MnaSystem& sys, const Eigen::VectorXd& z0, double t1, double dt,
                    const Eigen::VectorXd& z1) {
  const Eigen::VectorXd r = sys.E(z1) * (z1 - z0) / dt + sys.f(t1, z1);
  return r.head(static_cast<Eigen::Index>(sys.num_potentials())).lpNorm<Eigen::Infinity>();
}

CircuitWindowResult circuit_solve_window(const MnaSystem& sys, const CircuitState& initial,
                                         const Waveform& voltage, const TimeGrid& grid,
                                         const NewtonSettings& newton) {
  if (initial.z.size() != static_cast<Eigen::Index>(sys.dim()))
    throw std::invalid_argument("circuit state has wrong dimension");
  const Eigen::Index ic = sys.coupling_index();
  std::vector<CircuitState> trajectory;
  trajectory.reserve(grid.size());
  trajectory.push_back({initial.z, grid[0]});
  std::vector<double> current(grid.size());
  current[0] = initial.z[ic];
  Eigen::VectorXd z = initial.z;
  for (std::size_t step = 1; step < grid.size(); ++step) {
    const double t1 = grid[step];
    const double dt = t1 - grid[step - 1];
    const double v1 = voltage.at(t1);
    const Eigen::VectorXd z0 = z;
    auto res = [&](const Eigen::VectorXd& w, Eigen::VectorXd& r) {
      circuit_step_residual(sys, z0, t1, dt, w, v1, r);
    };
    auto jac = [&](const Eigen::VectorXd& w, Eigen::MatrixXd& j) {
      j = circuit_step_jacobian(sys, t1, dt, w);
    };
    newton_solve(res, jac, z, newton, step);
    trajectory.push_back({z, t1});
    current[step] = z[ic];
  }
  return {Waveform(grid, std::move(current)), std::move(trajectory)};
}

PerturbationGain perturbed_response(const MnaSystem& sys, const CircuitState& initial,
                                    const Waveform& voltage, const Waveform& delta,
                                    const TimeGrid& grid, const NewtonSettings& newton) {
  std::vector<double> shifted(grid.size());
  std::vector<double> base(grid.size());
  PerturbationGain gain;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double d = delta.at(grid[n]);
    base[n] = voltage.at(grid[n]);
    shifted[n] = base[n] + d;
    gain.max_delta = std::max(gain.max_delta, std::abs(d));
  }
  const auto ref = circuit_solve_window(sys, initial, Waveform(grid, base), grid, newton);
  const auto pert = circuit_solve_window(sys, initial, Waveform(grid, std::move(shifted)), grid, newton);
  for (std::size_t n = 0; n < grid.size(); ++n)
    gain.max_response = std::max(
        gain.max_response, (pert.trajectory[n].z - ref.trajectory[n].z).lpNorm<Eigen::Infinity>());
  gain.nu_hat = gain.max_response / std::max(gain.max_delta, 1e-14);
  return gain;
}

std::string trajectory_csv(const MnaSystem& sys, const std::vector<CircuitState>& trajectory) {
  std::vector<std::string> header{"t"};
  header.insert(header.end(), sys.state_names().begin(), sys.state_names().end());
  header.emplace_back("i_coupling");
  CsvTable table(header);
  std::vector<double> row(header.size());
  for (const auto& s : trajectory) {
    row[0] = s.t;
    for (Eigen::Index k = 0; k < s.z.size(); ++k) row[static_cast<std::size_t>(k) + 1] = s.z[k];
    table.add_row(row);
  }
  return table.str();
}

}  // namespace wrcosim
