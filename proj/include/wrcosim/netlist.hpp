#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace wrcosim {

enum class ElementKind {
  Resistor,
  Capacitor,
  Inductor,
  VoltageSource,
  CurrentSource,
  Diode,
  Field,
};

std::string_view to_string(ElementKind kind);

/// Independent source waveform: `dc <value>` or `sin <amp> <freq> [<phase>]`.
struct SourceSpec {
  enum class Shape { Dc, Sin };
  Shape shape = Shape::Dc;
  double amplitude = 0.0;
  double frequency = 0.0;  // hertz, sin only
  double phase = 0.0;      // radians, sin only

  double value(double t) const;
  double derivative(double t) const;

  bool operator==(const SourceSpec&) const = default;
};

/// Shockley diode i = Is (exp(v / Vt) - 1).
struct DiodeParams {
  double saturation_current = 0.0;
  double thermal_voltage = 0.0;

  bool operator==(const DiodeParams&) const = default;
};

struct FieldSpec {
  enum class Model { Lumped, Ladder };
  Model model = Model::Lumped;
  double capacitance = 0.0;   // lumped C, or ladder total series capacitance
  std::size_t segments = 0;   // ladder internal node count N
  double conductance = 0.0;   // ladder total series conductance

  bool operator==(const FieldSpec&) const = default;
};

/// R, C and L carry a single positive value (ohm, farad, henry).
using ElementParams = std::variant<double, SourceSpec, DiodeParams, FieldSpec>;

struct Element {
  std::string name;
  ElementKind kind = ElementKind::Resistor;
  int node_plus = 0;
  int node_minus = 0;
  ElementParams params;

  double value() const { return std::get<double>(params); }
  const SourceSpec& source() const { return std::get<SourceSpec>(params); }
  const DiodeParams& diode() const { return std::get<DiodeParams>(params); }
  const FieldSpec& field() const { return std::get<FieldSpec>(params); }

  bool operator==(const Element&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Validated circuit: node 0 is ground, node ids are 0..num_nodes()-1 and
/// all of them are used. At most one Field element is present; the parser
/// additionally demands exactly one.
class CircuitGraph {
 public:
  /// Throws std::invalid_argument when an invariant is violated.
  CircuitGraph(std::size_t num_nodes, std::vector<Element> elements);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_free_nodes() const { return num_nodes_ - 1; }
  const std::vector<Element>& elements() const { return elements_; }

  std::vector<const Element*> elements_of(ElementKind kind) const;
  const Element& field_element() const;
  const Element* find(std::string_view name) const;

  bool operator==(const CircuitGraph&) const = default;

 private:
  std::size_t num_nodes_;
  std::vector<Element> elements_;
};

CircuitGraph parse_netlist(std::string_view text);
CircuitGraph load_netlist(const std::string& path);

/// Text form accepted by parse_netlist; numbers are written with the
/// shortest round-tripping representation.
std::string to_netlist_text(const CircuitGraph& graph);

/// Reduced incidence matrix for one element kind: one row per non-ground
/// node, one column per element of that kind, +1 at n+ and -1 at n-.
Eigen::MatrixXd incidence(const CircuitGraph& graph, ElementKind kind);

}  // namespace wrcosim
