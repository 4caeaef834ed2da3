#include "wrcosim/topology.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include <json.hpp>

namespace wrcosim {

std::string to_string(Prediction p) {
  return p == Prediction::ConvergenceGuaranteed ? "ConvergenceGuaranteed" : "NoGuarantee";
}

std::string CvVerdict::summary() const {
  std::string out = "CV-connected: ";
  out += cv_connected ? "true" : "false";
  out += " (nodes " + std::to_string(node_a) + ", " + std::to_string(node_b) + ")";
  if (cv_connected) {
    out += " witness [";
    for (std::size_t k = 0; k < witness_path.size(); ++k) {
      if (k) out += ", ";
      out += witness_path[k];
    }
    out += "]";
  }
  out += " -> " + to_string(prediction);
  return out;
}

std::string CvVerdict::to_json() const {
  nlohmann::ordered_json j;
  j["cv_connected"] = cv_connected;
  j["witness"] = witness_path;
  j["prediction"] = to_string(prediction);
  j["nodes"] = {node_a, node_b};
  return j.dump();
}

CvVerdict cv_connected(const CircuitGraph& graph, int node_a, int node_b) {
  const auto n = static_cast<int>(graph.num_nodes());
  if (node_a < 0 || node_a >= n || node_b < 0 || node_b >= n)
    throw std::out_of_range("unknown node id");

  struct Edge {
    int to;
    std::size_t element;
  };
  std::vector<std::vector<Edge>> adj(graph.num_nodes());
  const auto& elements = graph.elements();
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const auto& e = elements[k];
    if (e.kind != ElementKind::Capacitor && e.kind != ElementKind::VoltageSource) continue;
    adj[static_cast<std::size_t>(e.node_plus)].push_back({e.node_minus, k});
    adj[static_cast<std::size_t>(e.node_minus)].push_back({e.node_plus, k});
  }

  // Breadth-first search from node_a gives component membership and a
  // shortest witness at the same time.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> via(graph.num_nodes(), kNone);
  std::vector<int> prev(graph.num_nodes(), -1);
  std::vector<bool> seen(graph.num_nodes(), false);
  std::deque<int> queue{node_a};
  seen[static_cast<std::size_t>(node_a)] = true;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == node_b) break;
    for (const auto& edge : adj[static_cast<std::size_t>(u)]) {
      const auto v = static_cast<std::size_t>(edge.to);
      if (seen[v]) continue;
      seen[v] = true;
      prev[v] = u;
      via[v] = edge.element;
      queue.push_back(edge.to);
    }
  }

  CvVerdict verdict;
  verdict.node_a = node_a;
  verdict.node_b = node_b;
  verdict.cv_connected = seen[static_cast<std::size_t>(node_b)];
  if (verdict.cv_connected) {
    for (int v = node_b; v != node_a; v = prev[static_cast<std::size_t>(v)])
      verdict.witness_path.push_back(elements[via[static_cast<std::size_t>(v)]].name);
    std::reverse(verdict.witness_path.begin(), verdict.witness_path.end());
  }
  verdict.prediction =
      verdict.cv_connected ? Prediction::NoGuarantee : Prediction::ConvergenceGuaranteed;
  return verdict;
}

CvVerdict predict(const CircuitGraph& graph) {
  const Element& field = graph.field_element();
  return cv_connected(graph, field.node_plus, field.node_minus);
}

}  // namespace wrcosim
