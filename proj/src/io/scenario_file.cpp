#include "swlb/scenario_file.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

#include "swlb/error.hpp"

namespace swlb::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

double to_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    config_error("key '" + key + "': '" + text + "' is not a finite number");
  return value;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    config_error("key '" + key + "': '" + text + "' is not an integer");
  return value;
}

}  // namespace

ScenarioFile parse_scenario(std::istream& in, const std::string& default_name) {
  std::map<std::string, std::string> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(line_number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error("line " + std::to_string(line_number) + ": empty key");
    if (!entries.emplace(key, value).second) config_error("duplicate key '" + key + "'");
  }

  const auto sim = entries.find("simulation");
  if (sim == entries.end()) config_error("missing required key 'simulation'");
  const long long simulation = to_integer("simulation", sim->second);
  if (simulation != 1 && simulation != 2) config_error("key 'simulation' must be 1 or 2");

  ScenarioFile file;
  file.name = default_name;
  std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters;
  setters["simulation"] = [](const std::string&, const std::string&) {};
  setters["name"] = [&](const std::string&, const std::string& v) { file.name = v; };
  setters["bootstrap_replicates"] = [&](const std::string& k, const std::string& v) {
    const long long b = to_integer(k, v);
    if (b < 2 || b > 100000000) config_error("key 'bootstrap_replicates' must be at least 2");
    file.bootstrap_replicates = static_cast<int>(b);
  };
  setters["level"] = [&](const std::string& k, const std::string& v) {
    file.level = to_real(k, v);
    if (!(file.level > 0.0 && file.level < 1.0)) config_error("key 'level' must lie in (0, 1)");
  };

  auto add_common = [&](auto& c) {
    setters["population_size"] = [&](const std::string& k, const std::string& v) { c.population_size = to_integer(k, v); };
    setters["sample_size"] = [&](const std::string& k, const std::string& v) { c.sample_size = to_integer(k, v); };
    setters["mu_x"] = [&](const std::string& k, const std::string& v) { c.mu_x = to_real(k, v); };
    setters["mu_z"] = [&](const std::string& k, const std::string& v) { c.mu_z = to_real(k, v); };
    setters["rho"] = [&](const std::string& k, const std::string& v) { c.rho = to_real(k, v); };
    setters["b0"] = [&](const std::string& k, const std::string& v) { c.b0 = to_real(k, v); };
    setters["b1"] = [&](const std::string& k, const std::string& v) { c.b1 = to_real(k, v); };
    setters["replications"] = [&](const std::string& k, const std::string& v) {
      const long long r = to_integer(k, v);
      if (r < 2 || r > 100000000) config_error("key 'replications' must be at least 2");
      c.replications = static_cast<int>(r);
    };
  };

  Sim1Config sim1;
  Sim2Config sim2;
  if (simulation == 1) {
    add_common(sim1);
    setters["sigma_x"] = [&](const std::string& k, const std::string& v) { sim1.sigma_x = to_real(k, v); };
    setters["sigma_z"] = [&](const std::string& k, const std::string& v) { sim1.sigma_z = to_real(k, v); };
  } else {
    add_common(sim2);
    setters["beta"] = [&](const std::string& k, const std::string& v) { sim2.beta = to_real(k, v); };
    setters["sigma_x2"] = [&](const std::string& k, const std::string& v) { sim2.sigma_x2 = to_real(k, v); };
    setters["sigma_v2"] = [&](const std::string& k, const std::string& v) { sim2.sigma_v2 = to_real(k, v); };
    setters["sigma_z2"] = [&](const std::string& k, const std::string& v) { sim2.sigma_z2 = to_real(k, v); };
  }

  for (const auto& [key, value] : entries) {
    const auto setter = setters.find(key);
    if (setter == setters.end())
      config_error("unknown key '" + key + "' for simulation " + std::to_string(simulation));
    setter->second(key, value);
  }

  if (simulation == 1) {
    validate(sim1);
    file.config = sim1;
  } else {
    validate(sim2);
    file.config = sim2;
  }
  return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open scenario file '" + path.string() + "'");
  return parse_scenario(in, path.stem().string());
}

}  // namespace swlb::io
