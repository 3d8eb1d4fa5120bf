#include "swlb/report_io.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>

namespace swlb::io {

using nlohmann::ordered_json;

namespace {

ordered_json failure_json(const std::map<ErrorCode, int>& reasons) {
  ordered_json out = ordered_json::object();
  for (const auto& [code, count] : reasons) out[std::string(to_string(code))] = count;
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::string dump(const ordered_json& json) { return json.dump(2) + "\n"; }

ordered_json to_json(const cli::FitReport& report) {
  ordered_json out;
  out["model"] = report.model;
  out["method"] = report.method;
  ordered_json params = ordered_json::array();
  for (const auto& p : report.parameters) {
    ordered_json item;
    item["name"] = p.name;
    item["estimate"] = p.estimate;
    item[report.interval_method == IntervalMethod::Wald ? "standard_error" : "bootstrap_sd"] = p.spread;
    item["lower"] = p.lower;
    item["upper"] = p.upper;
    if (p.pmle) item["pmle"] = *p.pmle;
    params.push_back(std::move(item));
  }
  out["parameters"] = std::move(params);
  out["interval"] = {{"level", report.level}, {"method", std::string(to_string(report.interval_method))}};
  ordered_json diag;
  diag["n"] = report.n;
  if (report.b_requested) diag["b_requested"] = *report.b_requested;
  if (report.b_effective) diag["b_effective"] = *report.b_effective;
  diag["failures"] = report.failures;
  diag["failure_reasons"] = failure_json(report.failure_reasons);
  if (report.seed) diag["seed"] = *report.seed;
  out["diagnostics"] = std::move(diag);
  return out;
}

ordered_json to_json(const ScenarioConfig& scenario) {
  return std::visit(
      [](const auto& c) {
        ordered_json out;
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Sim1Config>) {
          out["simulation"] = 1;
          out["population_size"] = c.population_size;
          out["sample_size"] = c.sample_size;
          out["mu_x"] = c.mu_x;
          out["mu_z"] = c.mu_z;
          out["sigma_x"] = c.sigma_x;
          out["sigma_z"] = c.sigma_z;
        } else {
          out["simulation"] = 2;
          out["population_size"] = c.population_size;
          out["sample_size"] = c.sample_size;
          out["beta"] = c.beta;
          out["mu_x"] = c.mu_x;
          out["mu_z"] = c.mu_z;
          out["sigma_x2"] = c.sigma_x2;
          out["sigma_v2"] = c.sigma_v2;
          out["sigma_z2"] = c.sigma_z2;
        }
        out["rho"] = c.rho;
        out["b0"] = c.b0;
        out["b1"] = c.b1;
        out["replications"] = c.replications;
        return out;
      },
      scenario);
}

ordered_json to_json(const ReplicationReport& report) {
  ordered_json out;
  out["scenario_name"] = report.scenario_name;
  out["scenario"] = to_json(report.scenario);
  out["target"] = std::holds_alternative<Sim1Config>(report.scenario) ? "mu_x" : "beta";
  out["truth"] = report.truth;
  out["level"] = report.options.level;
  out["bootstrap_replicates"] = report.options.bootstrap_replicates;
  out["master_seed"] = report.options.master_seed;
  ordered_json methods = ordered_json::array();
  for (const auto& m : report.methods) {
    ordered_json item;
    item["method"] = std::string(to_string(m.method));
    item["replications"] = m.replications;
    item["successes"] = m.successes;
    item["failures"] = m.failures();
    item["failure_reasons"] = failure_json(m.failure_reasons);
    item["mse"] = m.mse;
    item["bias"] = m.bias;
    item["coverage"] = m.coverage;
    item["mean_interval_width"] = m.mean_interval_width;
    methods.push_back(std::move(item));
  }
  out["methods"] = std::move(methods);
  return out;
}

ordered_json to_json(const WeightDiagnostics& d) {
  ordered_json out;
  out["scheme"] = std::string(to_string(d.scheme));
  out["n"] = d.coordinates.size();
  out["draws"] = d.draws;
  out["seed"] = d.seed;
  out["z_threshold"] = d.z_threshold;
  out["mean_condition"] = d.mean_condition ? "pass" : "fail";
  out["variance_condition"] = d.variance_condition ? "pass" : "fail";
  out["pass"] = d.mean_condition && d.variance_condition;
  ordered_json coords = ordered_json::array();
  for (std::size_t i = 0; i < d.coordinates.size(); ++i) {
    const auto& c = d.coordinates[i];
    ordered_json item;
    item["index"] = i;
    item["scaled_weight"] = c.target_mean;
    item["unnormalized"] = {{"mean", c.mean},           {"mean_se", c.mean_se},
                            {"variance", c.variance},   {"variance_se", c.variance_se},
                            {"target_mean", c.target_mean}, {"target_variance", c.target_variance},
                            {"mean_ok", c.mean_ok},     {"variance_ok", c.variance_ok}};
    item["normalized"] = {{"mean", c.normalized_mean},
                          {"mean_se", c.normalized_mean_se},
                          {"variance", c.normalized_variance},
                          {"variance_se", c.normalized_variance_se}};
    coords.push_back(std::move(item));
  }
  out["coordinates"] = std::move(coords);
  return out;
}

ordered_json error_json(const Error& error) {
  ordered_json detail;
  detail["code"] = std::string(to_string(error.code()));
  detail["message"] = error.what();
  if (error.row()) detail["row"] = *error.row();
  if (error.column()) detail["column"] = *error.column();
  return {{"error", std::move(detail)}};
}

namespace {

std::string row(const char* format, auto... args) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

}  // namespace

std::string render_table(const cli::FitReport& report) {
  const bool wald = report.interval_method == IntervalMethod::Wald;
  std::string out = report.model + " / " + report.method + ", n = " + std::to_string(report.n) + "\n";
  out += row("%-20s %14s %14s %14s %14s\n", "parameter", "estimate", wald ? "std.error" : "boot.sd", "lower",
             "upper");
  for (const auto& p : report.parameters)
    out += row("%-20s %14.6g %14.6g %14.6g %14.6g\n", p.name.c_str(), p.estimate, p.spread, p.lower, p.upper);
  out += row("%g%% %s interval", 100.0 * report.level, std::string(to_string(report.interval_method)).c_str());
  if (report.b_effective)
    out += row("; %lld of %d replicates used", static_cast<long long>(*report.b_effective), *report.b_requested);
  return out + "\n";
}

std::string render_table(const ReplicationReport& report) {
  std::string out = report.scenario_name + ": truth " + format_double(report.truth) + "\n";
  out += row("%-12s %8s %12s %12s %10s %12s\n", "method", "ok", "mse", "bias", "coverage", "width");
  for (const auto& m : report.methods)
    out += row("%-12s %4d/%-3d %12.5g %12.5g %10.3f %12.5g\n", std::string(to_string(m.method)).c_str(), m.successes,
               m.replications, m.mse, m.bias, m.coverage, m.mean_interval_width);
  return out;
}

std::string replication_csv_header() {
  return "scenario,simulation,population_size,sample_size,rho,b1,method,replications,successes,failures,"
         "truth,mse,bias,coverage,mean_interval_width";
}

void write_replication_csv(std::ostream& out, const ReplicationReport& report, bool header) {
  if (header) out << replication_csv_header() << '\n';
  const int simulation = std::holds_alternative<Sim1Config>(report.scenario) ? 1 : 2;
  const auto [population, sample, rho, b1] = std::visit(
      [](const auto& c) { return std::tuple{c.population_size, c.sample_size, c.rho, c.b1}; }, report.scenario);
  for (const auto& m : report.methods) {
    out << report.scenario_name << ',' << simulation << ',' << population << ',' << sample << ','
        << format_double(rho) << ',' << format_double(b1) << ',' << to_string(m.method) << ',' << m.replications
        << ',' << m.successes << ',' << m.failures() << ',' << format_double(report.truth) << ','
        << format_double(m.mse) << ',' << format_double(m.bias) << ',' << format_double(m.coverage) << ','
        << format_double(m.mean_interval_width) << '\n';
  }
}

}  // namespace swlb::io
