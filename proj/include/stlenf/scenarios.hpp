#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stlenf/signal.hpp"

namespace stlenf {

// Built-in demonstration scenarios with their properties and signal
// generators; used by the bench command and the randomized test corpora.
struct Scenario {
  std::string name;
  std::string property;
  std::vector<std::string> variables;
};

const std::vector<Scenario>& all_scenarios();
const Scenario& scenario_by_name(const std::string& name);

// Compliant trace for the scenario, with seed-driven benign variation.
Signal scenario_satisfying(const std::string& name, uint64_t seed);

// Violating trace with the given number of violation points (threshold
// crossings introduced into a compliant baseline). For "stopping" with an
// even count the encoded word has exactly violations + 4 events; an odd count
// trades one spike crossing for a missing-stop tail violation.
Signal scenario_violating(const std::string& name, int violations, uint64_t seed);

}  // namespace stlenf
