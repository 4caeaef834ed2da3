#pragma once

#include <string>
#include <vector>

#include "wrcosim/netlist.hpp"

namespace wrcosim {

enum class Prediction { ConvergenceGuaranteed, NoGuarantee };

std::string to_string(Prediction p);

/// Result of the CV-connectivity test between two nodes.
struct CvVerdict {
  int node_a = 0;
  int node_b = 0;
  bool cv_connected = false;
  /// Element names along a shortest capacitor/voltage-source path from
  /// node_a to node_b; empty when not connected or when node_a == node_b.
  std::vector<std::string> witness_path;
  Prediction prediction = Prediction::ConvergenceGuaranteed;

  std::string summary() const;
  std::string to_json() const;
};

/// Two nodes are CV-connected when a path made only of capacitors and
/// voltage sources joins them. Throws std::out_of_range for unknown nodes.
CvVerdict cv_connected(const CircuitGraph& graph, int node_a, int node_b);

/// Applies cv_connected to the Field element's terminals. Not CV-connected
/// coupling nodes guarantee waveform-relaxation convergence on small
/// windows; the converse is not claimed.
CvVerdict predict(const CircuitGraph& graph);

}  // namespace wrcosim
