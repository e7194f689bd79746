#pragma once

#include <string>

#include "coopsim/coopsim.hpp"

namespace fixtures {

inline std::string config_path(const std::string& name) { return std::string(COOPSIM_CONFIG_DIR) + "/" + name; }

inline coopsim::NetworkConfig load(const std::string& name) { return coopsim::load_config(config_path(name)); }

inline coopsim::NetworkConfig parse(const char* text) { return coopsim::validate_config(coopsim::Json::parse(text)); }

// N=1, K=1, one label; schemes r=[1] and r=[2], both always supported.
inline const char* kTwoSchemes = R"({
  "shape": {"N": 1, "K": 1, "T": 10},
  "fading": {"alphabet": ["a"], "states": [{"f1": ["a"], "f2": ["a"], "p": 1.0}]},
  "schemes": [{"id": 1, "rates": [1.0]}, {"id": 2, "rates": [2.0]}],
  "support": [{"m": 1, "g1": ["a"], "g2": ["a"]}, {"m": 2, "g1": ["a"], "g2": ["a"]}]
})";

// N=1, K=1, labels {a, b}; the controller examples that need two first-hop states.
inline const char* kTwoLabels = R"({
  "shape": {"N": 1, "K": 1, "T": 10},
  "fading": {"alphabet": ["a", "b"], "states": [
    {"f1": ["a"], "f2": ["a"], "p": 0.5}, {"f1": ["b"], "f2": ["b"], "p": 0.5}]},
  "schemes": [{"id": 1, "rates": [1.0]}, {"id": 2, "rates": [2.0]}],
  "support": [{"m": 1, "g1": ["a"], "g2": ["a"]}, {"m": 2, "g1": ["b"], "g2": ["a"]}]
})";

}  // namespace fixtures
