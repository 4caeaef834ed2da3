#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "wrcosim/oracle.hpp"

using namespace wrcosim;

TEST_SUITE("oracle") {

TEST_CASE("zero sources keep every state at zero") {
  const auto coupled = make_coupled_system(parse_netlist("V1 1 0 dc 0\nR1 1 2 1\nF1 2 0 lumped 1\n"));
  const auto mono = monolithic_solve(coupled, 1e-2, 1.0);
  CHECK(max_abs(mono.v) == 0.0);
  CHECK(max_abs(mono.i) == 0.0);
  for (const auto& z : mono.z) CHECK(z.isZero());
}

TEST_CASE("circuit_a reference solution") {
  const auto coupled = make_coupled_system(testing::corpus("circuit_a.net"));
  CHECK(coupled.dim() == 8 + 4 + 1);
  const auto coarse = monolithic_solve(coupled, 2e-3, 5.0);
  const auto mid = monolithic_solve(coupled, 1e-3, 5.0);
  const auto fine = monolithic_solve(coupled, 5e-4, 5.0);
  for (const auto* m : {&coarse, &mid, &fine}) {
    for (double v : m->v.values()) CHECK(std::isfinite(v));
    CHECK(m->max_coupling_residual <= 1e-9);
    CHECK(m->max_kcl_residual <= 1e-9);
  }
  auto diff = [](const MonolithicResult& a, const MonolithicResult& b) {
    double d = 0.0;
    for (std::size_t n = 0; n < a.grid.size(); ++n) d = std::max(d, std::abs(a.v[n] - b.v.at(a.grid[n])));
    return d;
  };
  const double d1 = diff(coarse, mid), d2 = diff(mid, fine);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("consistent start") {
  const auto coupled = make_coupled_system(testing::corpus("circuit_a.net"));
  const auto start = consistent_start(coupled);
  CHECK(start.circuit.z.isZero());
  CHECK(start.field.x.isZero());
  CHECK(constraint_residual(coupled, start, 0.0) <= 1e-12);

  auto elements = testing::corpus("circuit_a.net").elements();
  for (auto& e : elements)
    if (e.name == "Vs") e.params = SourceSpec{SourceSpec::Shape::Dc, 1.0, 0.0, 0.0};
  const auto dc = make_coupled_system(CircuitGraph(5, elements));
  CHECK_THROWS_AS(consistent_start(dc), InconsistentStartError);

  auto phased = testing::corpus("circuit_b.net").elements();
  for (auto& e : phased)
    if (e.name == "Is") e.params = SourceSpec{SourceSpec::Shape::Sin, 0.5, 1.0, 0.3};
  CHECK_THROWS_AS(consistent_start(make_coupled_system(CircuitGraph(5, phased))), InconsistentStartError);
}

TEST_CASE("hand-built consistent state of the source-resistor-field toy") {
  const auto coupled = make_coupled_system(parse_netlist("V1 1 0 dc 1\nR1 1 2 1\nF1 2 0 lumped 1\n"));
  CHECK_THROWS_AS(consistent_start(coupled), InconsistentStartError);
  // z = [e1, e2, i_V1, i]: source fixes e1 = 1, field voltage 0 fixes e2 = 0,
  // so 1 A flows through R1 into the field and back through the source.
  CoupledState state{{Eigen::Vector4d(1.0, 0.0, -1.0, 1.0), 0.0}, zero_field_state(*coupled.field)};
  CHECK_NOTHROW(verify_consistent(coupled, state, 0.0));

  CoupledState wrong_current = state;
  wrong_current.circuit.z[3] = 0.5;
  CHECK_THROWS_AS(verify_consistent(coupled, wrong_current, 0.0), InconsistentStartError);

  CoupledState wrong_voltage = state;
  wrong_voltage.circuit.z[1] = 0.1;
  CHECK_THROWS_AS(verify_consistent(coupled, wrong_voltage, 0.0), InconsistentStartError);
}

TEST_CASE("the reference solution is a fixed point of both subsystem solves") {
  const auto coupled = make_coupled_system(testing::corpus("circuit_a.net"));
  const auto mono = monolithic_solve(coupled, 1e-3, 1.0);
  const auto start = consistent_start(coupled);
  const auto field = field_solve_window(*coupled.field, start.field, mono.i, mono.grid);
  const auto circuit = circuit_solve_window(coupled.mna, start.circuit, mono.v, mono.grid);
  CHECK(max_abs_diff(field.v, mono.v) <= 1e-9);
  CHECK(max_abs_diff(circuit.current, mono.i) <= 1e-9);
}

TEST_CASE("csv export") {
  const auto coupled = make_coupled_system(testing::corpus("circuit_a.net"));
  const auto mono = monolithic_solve(coupled, 0.1, 0.5);
  const std::string csv = monolithic_csv(coupled, mono);
  CHECK(csv.substr(0, csv.find('\n')) ==
        "t,v_mono,e1,e2,e3,e4,i_L2,i_L1,i_Vs,x1,x2,x3,x4,i");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

}  // TEST_SUITE
