#include "wrcosim/netlist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace wrcosim {

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Resistor: return "Resistor";
    case ElementKind::Capacitor: return "Capacitor";
    case ElementKind::Inductor: return "Inductor";
    case ElementKind::VoltageSource: return "VoltageSource";
    case ElementKind::CurrentSource: return "CurrentSource";
    case ElementKind::Diode: return "Diode";
    case ElementKind::Field: return "Field";
  }
  return "?";
}

double SourceSpec::value(double t) const {
  if (shape == Shape::Dc) return amplitude;
  return amplitude * std::sin(2.0 * std::numbers::pi * frequency * t + phase);
}

double SourceSpec::derivative(double t) const {
  if (shape == Shape::Dc) return 0.0;
  const double w = 2.0 * std::numbers::pi * frequency;
  return amplitude * w * std::cos(w * t + phase);
}

ParseError::ParseError(std::size_t line, std::size_t column,
                       const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

// Union-find over node ids, used for the connectivity invariant.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

// Returns an error message, empty when the element is valid.
std::string check_element(const Element& e) {
  if (e.node_plus < 0 || e.node_minus < 0) return "negative node id";
  if (e.node_plus == e.node_minus) return "self-loop on node " + std::to_string(e.node_plus);
  switch (e.kind) {
    case ElementKind::Resistor:
    case ElementKind::Capacitor:
    case ElementKind::Inductor:
      if (!std::holds_alternative<double>(e.params)) return "missing value";
      if (!(e.value() > 0.0) || !std::isfinite(e.value()))
        return "value must be strictly positive";
      break;
    case ElementKind::VoltageSource:
    case ElementKind::CurrentSource: {
      if (!std::holds_alternative<SourceSpec>(e.params)) return "missing source spec";
      const auto& s = e.source();
      if (!std::isfinite(s.amplitude) || !std::isfinite(s.phase))
        return "non-finite source parameter";
      if (s.shape == SourceSpec::Shape::Sin && !(s.frequency > 0.0))
        return "sin frequency must be positive";
      break;
    }
    case ElementKind::Diode: {
      if (!std::holds_alternative<DiodeParams>(e.params)) return "missing diode parameters";
      const auto& d = e.diode();
      if (!(d.saturation_current > 0.0) || !(d.thermal_voltage > 0.0))
        return "diode Is and Vt must be positive";
      break;
    }
    case ElementKind::Field: {
      if (!std::holds_alternative<FieldSpec>(e.params)) return "missing field spec";
      const auto& f = e.field();
      if (!(f.capacitance > 0.0)) return "field capacitance must be positive";
      if (f.model == FieldSpec::Model::Ladder) {
        if (f.segments < 1) return "ladder needs at least one internal node";
        if (!(f.conductance >= 0.0)) return "ladder conductance must be non-negative";
      }
      break;
    }
  }
  return {};
}

}  // namespace

CircuitGraph::CircuitGraph(std::size_t num_nodes, std::vector<Element> elements)
    : num_nodes_(num_nodes), elements_(std::move(elements)) {
  if (num_nodes_ < 2) throw std::invalid_argument("circuit needs ground and at least one node");
  std::unordered_set<std::string> names;
  std::vector<bool> used(num_nodes_, false);
  DisjointSets sets(num_nodes_);
  std::size_t fields = 0;
  for (const auto& e : elements_) {
    if (auto msg = check_element(e); !msg.empty())
      throw std::invalid_argument(e.name + ": " + msg);
    if (!names.insert(e.name).second)
      throw std::invalid_argument("duplicate element name " + e.name);
    const auto a = static_cast<std::size_t>(e.node_plus);
    const auto b = static_cast<std::size_t>(e.node_minus);
    if (a >= num_nodes_ || b >= num_nodes_)
      throw std::invalid_argument(e.name + ": node id out of range");
    used[a] = used[b] = true;
    sets.unite(a, b);
    if (e.kind == ElementKind::Field) ++fields;
  }
  if (fields > 1) throw std::invalid_argument("more than one Field element");
  if (!used[0]) throw std::invalid_argument("missing ground node 0");
  for (std::size_t n = 1; n < num_nodes_; ++n) {
    if (!used[n]) throw std::invalid_argument("node " + std::to_string(n) + " is unused");
    if (sets.find(n) != sets.find(0))
      throw std::invalid_argument("node " + std::to_string(n) + " is not connected to ground");
  }
}

std::vector<const Element*> CircuitGraph::elements_of(ElementKind kind) const {
  std::vector<const Element*> out;
  for (const auto& e : elements_)
    if (e.kind == kind) out.push_back(&e);
  return out;
}

const Element& CircuitGraph::field_element() const {
  for (const auto& e : elements_)
    if (e.kind == ElementKind::Field) return e;
  throw std::invalid_argument("circuit has no Field element");
}

const Element* CircuitGraph::find(std::string_view name) const {
  for (const auto& e : elements_)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::size_t line_no, std::vector<Token> tokens)
      : line_no_(line_no), tokens_(std::move(tokens)) {}

  const Token& next(const char* what) {
    if (pos_ >= tokens_.size()) {
      const std::size_t col = tokens_.empty()
                                  ? 1
                                  : tokens_.back().column + tokens_.back().text.size();
      throw ParseError(line_no_, col, std::string("expected ") + what);
    }
    return tokens_[pos_++];
  }

  bool has_more() const { return pos_ < tokens_.size(); }

  double number(const char* what) {
    const auto& tok = next(what);
    double value = 0.0;
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    if (!tok.text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last)
      throw ParseError(line_no_, tok.column,
                       std::string("expected ") + what + ", got '" + std::string(tok.text) + "'");
    return value;
  }

  int node() {
    const auto& tok = next("node id");
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size() || value < 0)
      throw ParseError(line_no_, tok.column,
                       "expected non-negative integer node id, got '" + std::string(tok.text) + "'");
    return value;
  }

  void finish() {
    if (has_more())
      throw ParseError(line_no_, tokens_[pos_].column,
                       "unexpected token '" + std::string(tokens_[pos_].text) + "'");
  }

  [[noreturn]] void fail(std::size_t column, const std::string& what) const {
    throw ParseError(line_no_, column, what);
  }

  std::size_t line() const { return line_no_; }

 private:
  std::size_t line_no_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::optional<ElementKind> kind_from_letter(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'R': return ElementKind::Resistor;
    case 'C': return ElementKind::Capacitor;
    case 'L': return ElementKind::Inductor;
    case 'V': return ElementKind::VoltageSource;
    case 'I': return ElementKind::CurrentSource;
    case 'D': return ElementKind::Diode;
    case 'F': return ElementKind::Field;
    default: return std::nullopt;
  }
}

SourceSpec parse_source(LineParser& p) {
  const auto& shape = p.next("source shape (dc|sin)");
  SourceSpec s;
  if (shape.text == "dc") {
    s.shape = SourceSpec::Shape::Dc;
    s.amplitude = p.number("dc value");
  } else if (shape.text == "sin") {
    s.shape = SourceSpec::Shape::Sin;
    s.amplitude = p.number("sin amplitude");
    s.frequency = p.number("sin frequency");
    if (p.has_more()) s.phase = p.number("sin phase");
  } else {
    p.fail(shape.column, "unknown source shape '" + std::string(shape.text) + "'");
  }
  return s;
}

FieldSpec parse_field(LineParser& p) {
  const auto& model = p.next("field model (lumped|ladder)");
  FieldSpec f;
  if (model.text == "lumped") {
    f.model = FieldSpec::Model::Lumped;
    f.capacitance = p.number("capacitance");
  } else if (model.text == "ladder") {
    f.model = FieldSpec::Model::Ladder;
    const double n = p.number("ladder node count");
    if (n < 1 || n != std::floor(n) || n > 1e6)
      p.fail(model.column, "ladder node count must be a positive integer");
    f.segments = static_cast<std::size_t>(n);
    f.capacitance = p.number("total capacitance");
    f.conductance = p.number("total conductance");
  } else {
    p.fail(model.column, "unknown field model '" + std::string(model.text) + "'");
  }
  return f;
}

}  // namespace

CircuitGraph parse_netlist(std::string_view text) {
  std::vector<Element> elements;
  std::vector<std::size_t> element_lines;
  std::unordered_set<std::string> names;
  int max_node = -1;
  bool saw_ground = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.front().text == ".end") break;

    LineParser p(line_no, std::move(tokens));
    const auto& name_tok = p.next("element name");
    const auto kind = kind_from_letter(name_tok.text.front());
    if (!kind)
      p.fail(name_tok.column, "unknown element kind '" + std::string(1, name_tok.text.front()) + "'");
    Element e;
    e.name = std::string(name_tok.text);
    e.kind = *kind;
    if (!names.insert(e.name).second)
      p.fail(name_tok.column, "duplicate element name " + e.name);
    const std::size_t node_col = name_tok.column + name_tok.text.size() + 1;
    e.node_plus = p.node();
    e.node_minus = p.node();
    switch (e.kind) {
      case ElementKind::Resistor:
      case ElementKind::Capacitor:
      case ElementKind::Inductor:
        e.params = p.number("element value");
        break;
      case ElementKind::VoltageSource:
      case ElementKind::CurrentSource:
        e.params = parse_source(p);
        break;
      case ElementKind::Diode: {
        DiodeParams d;
        d.saturation_current = p.number("saturation current");
        d.thermal_voltage = p.number("thermal voltage");
        e.params = d;
        break;
      }
      case ElementKind::Field:
        e.params = parse_field(p);
        break;
    }
    p.finish();
    if (auto msg = check_element(e); !msg.empty()) p.fail(node_col, e.name + ": " + msg);
    max_node = std::max({max_node, e.node_plus, e.node_minus});
    saw_ground = saw_ground || e.node_plus == 0 || e.node_minus == 0;
    elements.push_back(std::move(e));
    element_lines.push_back(line_no);
  }

  const std::size_t fields = static_cast<std::size_t>(std::count_if(
      elements.begin(), elements.end(), [](const Element& e) { return e.kind == ElementKind::Field; }));
  if (fields == 0) throw ParseError(line_no, 1, "netlist has no Field element");
  if (fields > 1) {
    std::size_t seen = 0;
    for (std::size_t k = 0; k < elements.size(); ++k)
      if (elements[k].kind == ElementKind::Field && ++seen == 2)
        throw ParseError(element_lines[k], 1, "multiple Field elements");
  }
  if (!saw_ground) throw ParseError(line_no, 1, "missing ground node 0");
  try {
    return CircuitGraph(static_cast<std::size_t>(max_node) + 1, std::move(elements));
  } catch (const std::invalid_argument& ex) {
    throw ParseError(line_no, 1, ex.what());
  }
}

CircuitGraph load_netlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open netlist " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_netlist(buffer.str());
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_netlist_text(const CircuitGraph& graph) {
  std::string out;
  for (const auto& e : graph.elements()) {
    out += e.name + ' ' + std::to_string(e.node_plus) + ' ' + std::to_string(e.node_minus);
    switch (e.kind) {
      case ElementKind::Resistor:
      case ElementKind::Capacitor:
      case ElementKind::Inductor:
        out += ' ' + format_number(e.value());
        break;
      case ElementKind::VoltageSource:
      case ElementKind::CurrentSource: {
        const auto& s = e.source();
        if (s.shape == SourceSpec::Shape::Dc) {
          out += " dc " + format_number(s.amplitude);
        } else {
          out += " sin " + format_number(s.amplitude) + ' ' + format_number(s.frequency) + ' ' +
                 format_number(s.phase);
        }
        break;
      }
      case ElementKind::Diode:
        out += ' ' + format_number(e.diode().saturation_current) + ' ' +
               format_number(e.diode().thermal_voltage);
        break;
      case ElementKind::Field: {
        const auto& f = e.field();
        if (f.model == FieldSpec::Model::Lumped) {
          out += " lumped " + format_number(f.capacitance);
        } else {
          out += " ladder " + std::to_string(f.segments) + ' ' + format_number(f.capacitance) +
                 ' ' + format_number(f.conductance);
        }
        break;
      }
    }
    out += '\n';
  }
  out += ".end\n";
  return out;
}

Eigen::MatrixXd incidence(const CircuitGraph& graph, ElementKind kind) {
  const auto members = graph.elements_of(kind);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(graph.num_free_nodes()),
                                            static_cast<Eigen::Index>(members.size()));
  for (Eigen::Index col = 0; col < a.cols(); ++col) {
    const Element& e = *members[static_cast<std::size_t>(col)];
    if (e.node_plus > 0) a(e.node_plus - 1, col) = 1.0;
    if (e.node_minus > 0) a(e.node_minus - 1, col) = -1.0;
  }
  return a;
}

}  // namespace wrcosim
