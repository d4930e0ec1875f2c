#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace urn {

struct CheckResult {
  std::string id;       // preset name
  std::string name;     // one-line description
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

// Bundled verification scenarios, in suite order.
const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

// Runs one scenario (or "all"). seed 0 keeps each scenario's pinned seed.
std::vector<CheckResult> run_scenarios(const std::string& name, int threads,
                                       std::uint64_t seed = 0);

// Canonical config text for each scenario; the files under presets/ carry
// the same bytes.
const std::map<std::string, std::string>& preset_configs();

}  // namespace urn
