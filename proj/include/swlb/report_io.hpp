#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "swlb/bootstrap.hpp"
#include "swlb/cli.hpp"
#include "swlb/sim_harness.hpp"
#include "swlb/weight_resampler.hpp"

namespace swlb::io {

nlohmann::ordered_json to_json(const cli::FitReport& report);
nlohmann::ordered_json to_json(const ReplicationReport& report);
nlohmann::ordered_json to_json(const WeightDiagnostics& diagnostics);
nlohmann::ordered_json to_json(const ScenarioConfig& scenario);
nlohmann::ordered_json error_json(const Error& error);

// Pretty-printed, trailing newline. Doubles use the shortest representation
// that round-trips exactly.
std::string dump(const nlohmann::ordered_json& json);

// Fixed-width text tables over the same report objects.
std::string render_table(const cli::FitReport& report);
std::string render_table(const ReplicationReport& report);

// Header plus one row per method; column order is fixed.
std::string replication_csv_header();
void write_replication_csv(std::ostream& out, const ReplicationReport& report, bool header = true);

// Round-trip exact decimal for a double (shortest form).
std::string format_double(double value);

}  // namespace swlb::io
