#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "swlb/bootstrap.hpp"
#include "swlb/cli.hpp"
#include "swlb/estimators.hpp"
#include "swlb/models.hpp"
#include "swlb/report_io.hpp"
#include "swlb/scenario_file.hpp"
#include "swlb/sim_harness.hpp"
#include "swlb/survey_data.hpp"
#include "swlb/weight_resampler.hpp"

namespace swlb::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr std::int64_t kMinDiagnosticDraws = 1000;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first != std::string::npos) items.push_back(item.substr(first, last - first + 1));
  }
  return items;
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SWLB_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<int>(value);
  }
  return omp_get_max_threads();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write output file '" + path + "'");
  file << content;
}

ResampleScheme scheme_for(FitMethod method) {
  switch (method) {
    case FitMethod::WlbNaive: return ResampleScheme::DirichletCentered;
    case FitMethod::Wlb: return ResampleScheme::UniformDirichlet;
    default: return ResampleScheme::SurveyAdjusted;
  }
}

bool is_bootstrap(FitMethod method) {
  return method == FitMethod::Swlb || method == FitMethod::WlbNaive || method == FitMethod::Wlb;
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::GaussianMean ? "gaussian-mean" : "probit"; }

std::string to_string(FitMethod method) {
  switch (method) {
    case FitMethod::Pmle: return "pmle";
    case FitMethod::Swlb: return "swlb";
    case FitMethod::Unweighted: return "unweighted";
    case FitMethod::WlbNaive: return "wlb-naive";
    case FitMethod::Wlb: return "wlb";
  }
  return "unknown";
}

void validate(const FitRequest& r) {
  if (r.input.empty()) throw Error(ErrorCode::InvalidArgument, "--input is required");
  if (r.weight_col.empty()) throw Error(ErrorCode::InvalidArgument, "--weight-col is required");
  if (is_bootstrap(r.method) && r.b < 2)
    throw Error(ErrorCode::InvalidArgument, "method " + to_string(r.method) + " needs --b >= 2");
  if (!(r.level > 0.0 && r.level < 1.0)) throw Error(ErrorCode::InvalidArgument, "--level must lie in (0, 1)");
  if (r.model == ModelKind::Probit && !r.response_col)
    throw Error(ErrorCode::InvalidArgument, "probit model needs --response-col");
  if (r.model == ModelKind::GaussianMean && !r.response_col && r.covariates.size() != 1)
    throw Error(ErrorCode::InvalidArgument,
                "gaussian-mean needs --response-col or exactly one column in --covariates");
}

FitReport run_fit(const FitRequest& request) {
  validate(request);
  const auto start = std::chrono::steady_clock::now();

  ColumnSchema schema;
  schema.weight = request.weight_col;
  if (request.model == ModelKind::GaussianMean) {
    schema.response = request.response_col ? request.response_col : std::optional(request.covariates.front());
  } else {
    schema.response = request.response_col;
    schema.covariates = request.covariates;
  }
  const SurveyDataset data = load_csv(request.input, schema);

  const GaussianMeanModel gaussian;
  const ProbitRegressionModel probit(request.intercept);
  const LikelihoodModel& model =
      request.model == ModelKind::GaussianMean ? static_cast<const LikelihoodModel&>(gaussian) : probit;
  model.check_data(data);
  const ScaledWeights scaled = scale_weights(data.raw_weights());
  const auto names = model.param_names(data);

  FitReport report;
  report.model = to_string(request.model);
  report.method = to_string(request.method);
  report.level = request.level;
  report.n = data.size();

  if (is_bootstrap(request.method)) {
    BootstrapConfig config;
    config.b = request.b;
    config.seed = request.seed;
    config.scheme = scheme_for(request.method);
    const BootstrapResult result = run_bootstrap(model, data, scaled, config, resolve_threads(request.threads));
    const IntervalEstimate ui = percentile_interval(result, request.level);
    const DrawSummary summary = summarize(result);
    std::optional<Vector> pmle;
    if (request.with_pmle) pmle = fit_pmle(model, data, scaled).theta_hat;
    for (std::size_t k = 0; k < names.size(); ++k) {
      const auto c = static_cast<Index>(k);
      report.parameters.push_back(
          {names[k], summary.mean[c], summary.sd[c], ui.lower[c], ui.upper[c],
           pmle ? std::optional<double>((*pmle)[c]) : std::nullopt});
    }
    report.interval_method = IntervalMethod::Percentile;
    report.b_requested = request.b;
    report.b_effective = result.successes();
    report.failures = result.failures();
    report.failure_reasons = result.failure_reasons;
    report.seed = request.seed;
  } else {
    const PmleFit fit =
        request.method == FitMethod::Pmle ? fit_pmle(model, data, scaled) : fit_unweighted(model, data);
    const IntervalEstimate ci = wald_interval(fit, request.level);
    for (std::size_t k = 0; k < names.size(); ++k) {
      const auto c = static_cast<Index>(k);
      report.parameters.push_back(
          {names[k], fit.theta_hat[c], std::sqrt(std::max(fit.sandwich_cov(c, c), 0.0)), ci.lower[c], ci.upper[c], {}});
    }
    report.interval_method = IntervalMethod::Wald;
  }
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Survey-adjusted weighted likelihood bootstrap: fitting, simulation and weight diagnostics"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // fit
  FitRequest fit;
  std::string fit_model = "gaussian-mean", fit_method = "pmle", fit_covariates, fit_output, fit_response;
  bool no_intercept = false;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a CSV survey sample");
  fit_cmd->add_option("--input", fit.input, "CSV file with a header row")->required();
  fit_cmd->add_option("--weight-col", fit.weight_col, "Column holding raw sampling weights")->required();
  fit_cmd->add_option("--response-col", fit_response, "Response column (gaussian-mean: the analysed variable)");
  fit_cmd->add_option("--covariates", fit_covariates, "Comma-separated covariate columns");
  fit_cmd->add_option("--model", fit_model, "gaussian-mean | probit")->capture_default_str();
  fit_cmd->add_flag("--no-intercept", no_intercept, "Probit without an intercept column");
  fit_cmd->add_option("--method", fit_method, "pmle | swlb | unweighted | wlb-naive | wlb")->capture_default_str();
  fit_cmd->add_option("--b", fit.b, "Bootstrap replicates")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Master seed")->capture_default_str();
  fit_cmd->add_option("--level", fit.level, "Interval level")->capture_default_str();
  fit_cmd->add_flag("--with-pmle", fit.with_pmle, "Also report the PMLE next to bootstrap estimates");
  fit_cmd->add_option("--threads", fit.threads, "Worker threads (default: SWLB_THREADS or all cores)");
  fit_cmd->add_option("--output", fit_output, "Write the report here instead of stdout");
  std::string fit_format = "json";
  fit_cmd->add_option("--format", fit_format, "json | table")->check(CLI::IsMember({"json", "table"}))->capture_default_str();

  // simulate
  std::string scenario_path, sim_methods = "pmle,swlb,wlb-naive,unweighted", sim_output, sim_csv;
  std::uint64_t sim_seed = 0;
  int sim_threads = 0;
  std::optional<int> replications_override, b_override;
  std::optional<Index> population_override, sample_size_override;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo scenario and report MSE and coverage");
  sim_cmd->add_option("--scenario", scenario_path, "Scenario file (key = value)")->required();
  sim_cmd->add_option("--methods", sim_methods, "Comma list of pmle, swlb, wlb-naive, unweighted")->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--threads", sim_threads, "Worker threads (default: SWLB_THREADS or all cores)");
  sim_cmd->add_option("--output", sim_output, "Report path (default stdout)");
  std::string sim_format = "json";
  sim_cmd->add_option("--format", sim_format, "json | table")->check(CLI::IsMember({"json", "table"}))->capture_default_str();
  sim_cmd->add_option("--csv", sim_csv, "CSV report path (default: --output with .csv extension)");
  sim_cmd->add_option("--replications-override", replications_override, "Replace the scenario's replications");
  sim_cmd->add_option("--population-override", population_override, "Replace the scenario's population_size");
  sim_cmd->add_option("--sample-size-override", sample_size_override, "Replace the scenario's sample_size");
  sim_cmd->add_option("--b", b_override, "Replace the scenario's bootstrap_replicates");

  // check-weights
  std::string cw_weights = "1", cw_scheme = "survey-adjusted", cw_output;
  Index cw_n = 0;
  std::int64_t cw_draws = 100000;
  std::uint64_t cw_seed = 0;
  int cw_threads = 0;
  auto* cw_cmd = app.add_subcommand("check-weights", "Check the moment conditions of a weight scheme");
  cw_cmd->add_option("--weights", cw_weights, "Comma list of raw weights, tiled to --n")->capture_default_str();
  cw_cmd->add_option("--n", cw_n, "Number of units (default: length of --weights)");
  cw_cmd->add_option("--scheme", cw_scheme, "survey-adjusted | uniform-dirichlet | dirichlet-centered")
      ->capture_default_str();
  cw_cmd->add_option("--draws", cw_draws, "Monte Carlo draws (>= 1000)")->capture_default_str();
  cw_cmd->add_option("--seed", cw_seed, "Master seed")->capture_default_str();
  cw_cmd->add_option("--threads", cw_threads, "Worker threads (default: SWLB_THREADS or all cores)");
  cw_cmd->add_option("--output", cw_output, "JSON report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const Error error(ErrorCode::InvalidArgument, e.what());
    err << io::dump(io::error_json(error));
    return kExitInput;
  }

  try {
    if (fit_cmd->parsed()) {
      if (fit_model == "gaussian-mean") fit.model = ModelKind::GaussianMean;
      else if (fit_model == "probit") fit.model = ModelKind::Probit;
      else throw Error(ErrorCode::InvalidArgument, "unknown --model '" + fit_model + "'");
      if (fit_method == "pmle") fit.method = FitMethod::Pmle;
      else if (fit_method == "swlb") fit.method = FitMethod::Swlb;
      else if (fit_method == "unweighted") fit.method = FitMethod::Unweighted;
      else if (fit_method == "wlb-naive") fit.method = FitMethod::WlbNaive;
      else if (fit_method == "wlb") fit.method = FitMethod::Wlb;
      else throw Error(ErrorCode::InvalidArgument, "unknown --method '" + fit_method + "'");
      if (!fit_response.empty()) fit.response_col = fit_response;
      fit.covariates = split_list(fit_covariates);
      fit.intercept = !no_intercept;
      const FitReport report = run_fit(fit);
      write_output(fit_output, fit_format == "table" ? io::render_table(report) : io::dump(io::to_json(report)), out);
      err << "fit finished in " << report.runtime_seconds << " s\n";
      return kExitOk;
    }

    if (sim_cmd->parsed()) {
      io::ScenarioFile scenario = io::load_scenario(scenario_path);
      std::visit(
          [&](auto& c) {
            if (replications_override) c.replications = *replications_override;
            if (population_override) c.population_size = *population_override;
            if (sample_size_override) c.sample_size = *sample_size_override;
            validate(c);
          },
          scenario.config);
      MonteCarloOptions options;
      options.methods.clear();
      for (const auto& name : split_list(sim_methods)) {
        const auto method = parse_method(name);
        if (!method) throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
        options.methods.push_back(*method);
      }
      options.level = scenario.level;
      options.bootstrap_replicates = b_override ? *b_override : scenario.bootstrap_replicates;
      if (options.bootstrap_replicates < 2) throw Error(ErrorCode::ConfigError, "--b must be at least 2");
      options.master_seed = sim_seed;
      options.threads = resolve_threads(sim_threads);
      const auto start = std::chrono::steady_clock::now();
      const ReplicationReport report = run_monte_carlo(scenario.config, options, scenario.name);
      write_output(sim_output, sim_format == "table" ? io::render_table(report) : io::dump(io::to_json(report)), out);
      std::string csv_path = sim_csv;
      if (csv_path.empty() && !sim_output.empty() && sim_output != "-")
        csv_path = std::filesystem::path(sim_output).replace_extension(".csv").string();
      if (!csv_path.empty()) {
        std::ostringstream csv;
        io::write_replication_csv(csv, report);
        write_output(csv_path, csv.str(), out);
      }
      err << "simulate finished in "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
      return kExitOk;
    }

    if (cw_cmd->parsed()) {
      const auto scheme = parse_scheme(cw_scheme);
      if (!scheme) throw Error(ErrorCode::InvalidArgument, "unknown --scheme '" + cw_scheme + "'");
      if (cw_draws < kMinDiagnosticDraws) throw Error(ErrorCode::InvalidArgument, "--draws must be at least 1000");
      std::vector<double> pattern;
      for (const auto& item : split_list(cw_weights)) {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc() || ptr != item.data() + item.size())
          throw Error(ErrorCode::InvalidArgument, "--weights: '" + item + "' is not a number");
        pattern.push_back(value);
      }
      if (pattern.empty()) throw Error(ErrorCode::InvalidArgument, "--weights is empty");
      const Index n = cw_n > 0 ? cw_n : static_cast<Index>(pattern.size());
      std::vector<double> raw(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = pattern[i % pattern.size()];
      const ScaledWeights scaled = scale_weights(raw);
      const WeightDiagnostics diagnostics =
          weight_moment_diagnostics(*scheme, scaled, cw_draws, cw_seed, resolve_threads(cw_threads));
      write_output(cw_output, io::dump(io::to_json(diagnostics)), out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << io::dump(io::error_json(e));
    return is_numerical(e.code()) ? kExitNumerical : kExitInput;
  }
  return kExitInput;
}

}  // namespace swlb::cli
