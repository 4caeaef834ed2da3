#include "wrcosim/oracle.hpp"

#include <cmath>

#include "wrcosim/csv.hpp"

namespace wrcosim {

CoupledSystem make_coupled_system(const CircuitGraph& graph) {
  return {assemble_mna(graph), make_field_model(graph.field_element().field())};
}

namespace {

struct Layout {
  Eigen::Index nz;
  Eigen::Index nx;
  Eigen::Index ic;  // coupling current inside z
  Eigen::Index iv;  // field voltage
};

Layout layout_of(const CoupledSystem& c) {
  const auto nz = static_cast<Eigen::Index>(c.mna.dim());
  const auto nx = static_cast<Eigen::Index>(c.field->state_dim());
  return {nz, nx, c.mna.coupling_index(), nz + nx};
}

Eigen::VectorXd pack(const CoupledState& s, const Layout& l) {
  Eigen::VectorXd w(l.nz + l.nx + 1);
  w.head(l.nz) = s.circuit.z;
  w.segment(l.nz, l.nx) = s.field.x;
  w[l.iv] = s.field.v;
  return w;
}

}  // namespace

double constraint_residual(const CoupledSystem& coupled, const CoupledState& state, double t) {
  const Layout l = layout_of(coupled);
  if (state.circuit.z.size() != l.nz || state.field.x.size() != l.nx)
    throw std::invalid_argument("coupled state has wrong dimension");
  const Eigen::VectorXd w = pack(state, l);
  const Eigen::Index n = w.size();
  const Eigen::VectorXd& z = state.circuit.z;
  const Eigen::VectorXd& x = state.field.x;
  const double i = z[l.ic];
  const double v = state.field.v;

  // Descriptor form  M w' + F(t, w) = 0.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.topLeftCorner(l.nz, l.nz) = coupled.mna.E(z);
  if (l.nx > 0) {
    m.block(l.nz, l.nz, l.nx, l.nx).setIdentity();
    m.block(l.nz, l.ic, l.nx, 1) = -coupled.field->r_chi(i);
  }
  m(l.iv, l.iv) = 1.0;

  Eigen::VectorXd f(n);
  f.head(l.nz) = coupled.mna.f(t, z);
  f[l.ic] -= v;
  if (l.nx > 0) f.segment(l.nz, l.nx) = -coupled.field->chi(x, i, v, t);
  f[l.iv] = -coupled.field->g(x, i, v, t);

  const Eigen::MatrixXd left_null = Eigen::FullPivLU<Eigen::MatrixXd>(m.transpose()).kernel();
  if (left_null.cols() == 0 || left_null.isZero()) return 0.0;
  return (left_null.transpose() * f).lpNorm<Eigen::Infinity>();
}

void verify_consistent(const CoupledSystem& coupled, const CoupledState& state, double t,
                       double tol) {
  const double r = constraint_residual(coupled, state, t);
  if (!(r <= tol))
    throw InconsistentStartError("inconsistent initial state: algebraic residual " +
                                 std::to_string(r));
}

CoupledState consistent_start(const CoupledSystem& coupled, double t0) {
  const auto vs = coupled.mna.vsource_values(t0);
  const auto is = coupled.mna.isource_values(t0);
  for (double v : vs)
    if (v != 0.0)
      throw InconsistentStartError(
          "inconsistent zero start: a voltage source is nonzero at t0; use sin sources with zero phase");
  for (double i : is)
    if (i != 0.0)
      throw InconsistentStartError(
          "inconsistent zero start: a current source is nonzero at t0; use sin sources with zero phase");
  CoupledState state{zero_circuit_state(coupled.mna, t0), zero_field_state(*coupled.field, t0)};
  verify_consistent(coupled, state, t0);
  return state;
}

MonolithicResult monolithic_solve(const CoupledSystem& coupled, double dt, double t_end,
                                  const NewtonSettings& newton) {
  return monolithic_solve(coupled, consistent_start(coupled, 0.0), TimeGrid::uniform(0.0, t_end, dt),
                          newton);
}

MonolithicResult monolithic_solve(const CoupledSystem& coupled, const CoupledState& initial,
                                  const TimeGrid& grid, const NewtonSettings& newton) {
  const Layout l = layout_of(coupled);
  const FieldModel& field = *coupled.field;
  const MnaSystem& mna = coupled.mna;

  MonolithicResult out{grid, {}, {}, Waveform::constant(grid, 0.0), Waveform::constant(grid, 0.0)};
  out.z.reserve(grid.size());
  out.x.reserve(grid.size());
  std::vector<double> v(grid.size());
  std::vector<double> i(grid.size());

  Eigen::VectorXd w = pack(initial, l);
  out.z.push_back(w.head(l.nz));
  out.x.push_back(w.segment(l.nz, l.nx));
  v[0] = w[l.iv];
  i[0] = w[l.ic];

  for (std::size_t step = 1; step < grid.size(); ++step) {
    const double t1 = grid[step];
    const double dt = t1 - grid[step - 1];
    const Eigen::VectorXd w0 = w;
    const Eigen::VectorXd z0 = w0.head(l.nz);
    const Eigen::VectorXd x0 = w0.segment(l.nz, l.nx);
    const double v0 = w0[l.iv];
    const double i0 = w0[l.ic];

    auto res = [&](const Eigen::VectorXd& s, Eigen::VectorXd& r) {
      const Eigen::VectorXd z1 = s.head(l.nz);
      const Eigen::VectorXd x1 = s.segment(l.nz, l.nx);
      circuit_step_residual(mna, z0, t1, dt, z1, s[l.iv], r.head(l.nz));
      field_step_residual(field, x0, v0, i0, s[l.ic], t1, dt, x1, s[l.iv], r.tail(l.nx + 1));
    };
    auto jac = [&](const Eigen::VectorXd& s, Eigen::MatrixXd& j) {
      const Eigen::VectorXd z1 = s.head(l.nz);
      const Eigen::VectorXd x1 = s.segment(l.nz, l.nx);
      j.setZero();
      j.topLeftCorner(l.nz, l.nz) = circuit_step_jacobian(mna, t1, dt, z1);
      j(l.ic, l.iv) = -1.0;
      Eigen::VectorXd current_col(l.nx + 1);
      field_step_jacobian(field, i0, s[l.ic], t1, dt, x1, s[l.iv],
                          j.block(l.nz, l.nz, l.nx + 1, l.nx + 1), current_col);
      j.block(l.nz, l.ic, l.nx + 1, 1) = current_col;
    };
    newton_solve(res, jac, w, newton, step);

    const Eigen::VectorXd z1 = w.head(l.nz);
    out.z.push_back(z1);
    out.x.push_back(w.segment(l.nz, l.nx));
    v[step] = w[l.iv];
    i[step] = w[l.ic];
    out.max_coupling_residual =
        std::max(out.max_coupling_residual, std::abs(mna.P().dot(z1) - v[step]));
    out.max_kcl_residual = std::max(out.max_kcl_residual, kcl_residual(mna, z0, t1, dt, z1));
  }
  out.v = Waveform(grid, std::move(v));
  out.i = Waveform(grid, std::move(i));
  return out;
}

std::string monolithic_csv(const CoupledSystem& coupled, const MonolithicResult& result) {
  std::vector<std::string> header{"t", "v_mono"};
  const auto& z_names = coupled.mna.state_names();
  header.insert(header.end(), z_names.begin(), z_names.end());
  const auto x_names = coupled.field->state_names();
  header.insert(header.end(), x_names.begin(), x_names.end());
  header.emplace_back("i");
  CsvTable table(header);
  const auto nz = static_cast<Eigen::Index>(z_names.size());
  std::vector<double> row;
  for (std::size_t n = 0; n < result.grid.size(); ++n) {
    row.clear();
    row.push_back(result.grid[n]);
    row.push_back(result.v[n]);
    for (Eigen::Index k = 0; k < nz; ++k) row.push_back(result.z[n][k]);
    for (Eigen::Index k = 0; k < result.x[n].size(); ++k) row.push_back(result.x[n][k]);
    row.push_back(result.i[n]);
    table.add_row(row);
  }
  return table.str();
}

}  // namespace wrcosim
