#include <doctest.h>

#include <random>
#include <string>

#include "support.hpp"
#include "wrcosim/netlist.hpp"

using namespace wrcosim;

TEST_SUITE("netlist") {

TEST_CASE("source resistor netlist with a field appended") {
  const auto g = parse_netlist("V1 1 0 sin 1.0 1.0\nR1 1 0 1.0\nF1 1 0 lumped 1\n.end");
  CHECK(g.elements().size() == 3);
  CHECK(g.num_free_nodes() == 1);
  const auto av = incidence(g, ElementKind::VoltageSource);
  const auto ar = incidence(g, ElementKind::Resistor);
  REQUIRE(av.rows() == 1);
  REQUIRE(av.cols() == 1);
  CHECK(av(0, 0) == 1.0);
  CHECK(ar(0, 0) == 1.0);
  CHECK(g.elements()[0].source().shape == SourceSpec::Shape::Sin);
  CHECK(g.elements()[0].source().phase == 0.0);
}

TEST_CASE("a netlist without a field is rejected") {
  CHECK_THROWS_AS(parse_netlist("V1 1 0 sin 1.0 1.0\nR1 1 0 1.0\n.end"), ParseError);
}

TEST_CASE("corpus circuits") {
  const auto a = testing::corpus("circuit_a.net");
  CHECK(a.elements().size() == 7);
  CHECK(a.num_free_nodes() == 4);
  CHECK(a.field_element().node_plus == 4);
  CHECK(a.field_element().node_minus == 0);
  const auto af = incidence(a, ElementKind::Field);
  CHECK(af.col(0).sum() == 1.0);
  CHECK(af(3, 0) == 1.0);

  const auto b = testing::corpus("circuit_b.net");
  const auto bf = incidence(b, ElementKind::Field);
  REQUIRE(bf.rows() == 4);
  CHECK(bf(1, 0) == 1.0);
  CHECK(bf.cwiseAbs().sum() == 1.0);

  const auto& ladder = a.field_element().field();
  CHECK(ladder.model == FieldSpec::Model::Ladder);
  CHECK(ladder.segments == 4);
  CHECK(ladder.capacitance == 0.5);
  CHECK(ladder.conductance == 0.2);
}

TEST_CASE("self-loop") {
  try {
    parse_netlist("R1 1 1 5.0\n.end");
    FAIL("expected a parse error");
  } catch (const ParseError& ex) {
    CHECK(ex.line() == 1);
    CHECK(std::string(ex.what()).find("self-loop") != std::string::npos);
  }
}

TEST_CASE("incidence columns") {
  const auto one = parse_netlist("R1 1 0 2\nF1 1 0 lumped 1\n");
  CHECK(incidence(one, ElementKind::Resistor)(0, 0) == 1.0);

  const auto three = parse_netlist("R1 2 1 1\nR2 1 0 1\nR3 3 0 1\nF1 3 2 lumped 1\n");
  const auto ar = incidence(three, ElementKind::Resistor);
  REQUIRE(ar.rows() == 3);
  CHECK(ar(0, 0) == -1.0);
  CHECK(ar(1, 0) == 1.0);
  CHECK(ar(2, 0) == 0.0);
  CHECK(incidence(three, ElementKind::Capacitor).cols() == 0);
}

TEST_CASE("reduced incidence columns sum to -1, 0 or +1") {
  const auto a = testing::corpus("circuit_a.net");
  for (auto kind : {ElementKind::Resistor, ElementKind::Capacitor, ElementKind::Inductor,
                    ElementKind::VoltageSource, ElementKind::CurrentSource, ElementKind::Field}) {
    const auto m = incidence(a, kind);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double s = m.col(c).sum();
      CHECK((s == -1.0 || s == 0.0 || s == 1.0));
      CHECK(m.col(c).cwiseAbs().sum() >= 1.0);
      CHECK(m.col(c).maxCoeff() <= 1.0);
      CHECK(m.col(c).minCoeff() >= -1.0);
    }
  }
}

TEST_CASE("round trip") {
  for (const char* name : {"circuit_a.net", "circuit_b.net"}) {
    const auto g = testing::corpus(name);
    CHECK(parse_netlist(to_netlist_text(g)) == g);
  }
  const auto g = parse_netlist(
      "V1 1 0 sin 0.1 3 0.7\nI2 2 0 dc 0.3\nR1 1 2 0.1\nD1 2 0 1e-14 0.025852\n"
      "C1 2 3 3.3e-7\nL1 3 0 1.2\nF1 3 0 ladder 7 0.3 0.1\n");
  const auto back = parse_netlist(to_netlist_text(g));
  CHECK(back == g);
  CHECK(back.find("D1")->diode().thermal_voltage == 0.025852);
}

TEST_CASE("case-insensitive kinds, comments and optional .end") {
  const auto g = parse_netlist("# header\nr1 1 0 1 # trailing\nf1 1 0 lumped 2");
  CHECK(g.elements()[0].kind == ElementKind::Resistor);
  CHECK(g.elements()[1].kind == ElementKind::Field);
}

TEST_CASE("errors carry line and column") {
  auto line_of = [](const char* text) {
    try {
      parse_netlist(text);
    } catch (const ParseError& ex) {
      return ex.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("R1 1 0 1\nX1 1 0 2\nF1 1 0 lumped 1\n") == 2);
  CHECK(line_of("R1 1 0 1\nR1 1 0 2\nF1 1 0 lumped 1\n") == 2);
  CHECK(line_of("R1 1 0 -1\nF1 1 0 lumped 1\n") == 1);
  CHECK(line_of("R1 1 0 abc\nF1 1 0 lumped 1\n") == 1);
  CHECK(line_of("R1 1 0 1 2\nF1 1 0 lumped 1\n") == 1);
  CHECK(line_of("V1 1 0 sin 1 0\nF1 1 0 lumped 1\n") == 1);
  CHECK(line_of("R1 1 0 1\nF1 1 0 lumped 1\nF2 1 0 lumped 1\n") == 3);
  CHECK_THROWS_AS(parse_netlist("R1 1 2 1\nF1 1 2 lumped 1\n"), ParseError);
  CHECK_THROWS_AS(parse_netlist("R1 1 0 1\nR2 2 3 1\nF1 1 0 lumped 1\n"), ParseError);
}

TEST_CASE("every single-token mutation of a valid file is either valid or rejected") {
  const std::string base = "V1 1 0 sin 1 1\nR1 1 2 1\nC1 2 0 1\nL1 2 3 2\nF1 3 0 lumped 1\n";
  const std::vector<std::string> replacements{"0", "-1", "1", "2", "nan", "x", "1e400", "3"};
  std::size_t rejected = 0;
  std::size_t pos = 0;
  while (pos < base.size()) {
    if (base[pos] == ' ' || base[pos] == '\n') {
      ++pos;
      continue;
    }
    const std::size_t end = base.find_first_of(" \n", pos);
    for (const auto& r : replacements) {
      const std::string text = base.substr(0, pos) + r + base.substr(end);
      try {
        const auto g = parse_netlist(text);
        for (const auto& e : g.elements()) {
          CHECK(e.node_plus != e.node_minus);
          if (e.kind == ElementKind::Resistor || e.kind == ElementKind::Capacitor ||
              e.kind == ElementKind::Inductor)
            CHECK(e.value() > 0.0);
        }
      } catch (const ParseError&) {
        ++rejected;
      }
    }
    pos = end;
  }
  CHECK(rejected > 0);
}

TEST_CASE("graph constructor invariants") {
  auto r = [](std::string name, int a, int b, double v) {
    return Element{std::move(name), ElementKind::Resistor, a, b, v};
  };
  CHECK_THROWS_AS(CircuitGraph(2, {r("R1", 1, 1, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(CircuitGraph(2, {r("R1", 1, 0, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(CircuitGraph(2, {r("R1", 1, 0, 1), r("R1", 1, 0, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(CircuitGraph(3, {r("R1", 1, 0, 1)}), std::invalid_argument);
  CHECK_NOTHROW(CircuitGraph(2, {r("R1", 1, 0, 1)}));
}

}  // TEST_SUITE
