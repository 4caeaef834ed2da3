#pragma once

#include <string>

#include "wrcosim/netlist.hpp"

namespace testing {

inline std::string data_path(const std::string& name) {
  return std::string(WRCOSIM_DATA_DIR) + "/" + name;
}

inline wrcosim::CircuitGraph corpus(const std::string& name) {
  return wrcosim::load_netlist(data_path(name));
}

}  // namespace testing
