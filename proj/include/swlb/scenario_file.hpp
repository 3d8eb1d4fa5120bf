#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "swlb/sim_harness.hpp"

namespace swlb::io {

// A declarative Monte Carlo scenario: one `key = value` per line, `#` starts a
// comment. `simulation` (1 or 2) is required; every other key defaults to the
// desk-scale value in Sim1Config / Sim2Config.
//
// Common keys: name, simulation, population_size, sample_size, mu_x, mu_z,
//   rho, b0, b1, replications, bootstrap_replicates, level
// Simulation 1 only: sigma_x, sigma_z
// Simulation 2 only: beta, sigma_x2, sigma_v2, sigma_z2
struct ScenarioFile {
  std::string name;
  ScenarioConfig config;
  int bootstrap_replicates = 2000;
  double level = 0.95;
};

// Throws ConfigError naming the offending key or line.
ScenarioFile parse_scenario(std::istream& in, const std::string& default_name = {});
ScenarioFile load_scenario(const std::filesystem::path& path);

}  // namespace swlb::io
