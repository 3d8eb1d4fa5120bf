#include "swlb/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "swlb/bootstrap.hpp"
#include "swlb/estimators.hpp"
#include "swlb/models.hpp"
#include "swlb/normal.hpp"

namespace swlb {

namespace {

enum Stage : std::uint64_t { kPopulationStage = 0, kSampleStage = 1, kMethodStageBase = 16 };

template <class Config>
void validate_common(const Config& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (c.sample_size < 2) fail("sample_size must be at least 2");
  if (c.population_size < c.sample_size) fail("sample_size must not exceed population_size");
  if (!(std::abs(c.rho) < 1.0)) fail("rho must lie in (-1, 1)");
  if (c.replications < 2) fail("replications must be at least 2");
  if (!std::isfinite(c.b0) || !std::isfinite(c.b1) || !std::isfinite(c.mu_x) || !std::isfinite(c.mu_z))
    fail("location and selection parameters must be finite");
}

// (a, b) with Var a = sa^2, Var b = sb^2, corr rho, via the 2x2 Cholesky factor.
inline std::pair<double, double> correlated_pair(Stream& rng, double sa, double sb, double rho) {
  const double e1 = rng.normal();
  const double e2 = rng.normal();
  return {sa * e1, sb * (rho * e1 + std::sqrt(1.0 - rho * rho) * e2)};
}

}  // namespace

void validate(const Sim1Config& c) {
  validate_common(c);
  if (!(c.sigma_x > 0.0) || !(c.sigma_z > 0.0)) throw Error(ErrorCode::ConfigError, "sigma_x and sigma_z must be positive");
}

void validate(const Sim2Config& c) {
  validate_common(c);
  if (!(c.sigma_x2 > 0.0) || !(c.sigma_v2 > 0.0) || !(c.sigma_z2 > 0.0))
    throw Error(ErrorCode::ConfigError, "sigma_x2, sigma_v2 and sigma_z2 must be positive");
  if (!std::isfinite(c.beta)) throw Error(ErrorCode::ConfigError, "beta must be finite");
}

Vector inclusion_probabilities(const Vector& z, double b0, double b1) {
  return z.unaryExpr([&](double v) { return normal_cdf(b0 + b1 * v); });
}

FinitePopulation generate_population_sim1(const Sim1Config& c, Stream& rng) {
  validate(c);
  FinitePopulation pop;
  pop.kind = PopulationKind::Gaussian;
  pop.variables.resize(c.population_size, 2);
  for (Index l = 0; l < c.population_size; ++l) {
    const auto [dx, dz] = correlated_pair(rng, c.sigma_x, c.sigma_z, c.rho);
    pop.variables(l, 0) = c.mu_x + dx;
    pop.variables(l, 1) = c.mu_z + dz;
  }
  pop.inclusion_probs = inclusion_probabilities(pop.variables.col(1), c.b0, c.b1);
  return pop;
}

FinitePopulation generate_population_sim2(const Sim2Config& c, Stream& rng) {
  validate(c);
  FinitePopulation pop;
  pop.kind = PopulationKind::Probit;
  pop.variables.resize(c.population_size, 3);
  const double sx = std::sqrt(c.sigma_x2);
  const double sv = std::sqrt(c.sigma_v2);
  const double sz = std::sqrt(c.sigma_z2);
  for (Index l = 0; l < c.population_size; ++l) {
    const double x = c.mu_x + sx * rng.normal();
    const auto [dv, dz] = correlated_pair(rng, sv, sz, c.rho);
    const double v = x * c.beta + dv;
    pop.variables(l, 0) = x;
    pop.variables(l, 1) = v > 0.0 ? 1.0 : 0.0;
    pop.variables(l, 2) = c.mu_z + dz;
  }
  pop.inclusion_probs = inclusion_probabilities(pop.variables.col(2), c.b0, c.b1);
  return pop;
}

std::vector<Index> select_units(const Vector& size, Index n, Stream& rng) {
  const Index total = size.size();
  if (n < 0 || n > total) throw Error(ErrorCode::InvalidArgument, "sample size exceeds population size");
  if (!(size.array() > 0.0).all() || !size.allFinite())
    throw Error(ErrorCode::InvalidArgument, "selection sizes must be finite and positive");
  std::vector<double> key(static_cast<std::size_t>(total));
  for (Index l = 0; l < total; ++l) key[static_cast<std::size_t>(l)] = rng.exponential(1.0) / size[l];
  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  auto by_key = [&](Index a, Index b) {
    const double ka = key[static_cast<std::size_t>(a)], kb = key[static_cast<std::size_t>(b)];
    return ka < kb || (ka == kb && a < b);
  };
  std::nth_element(order.begin(), order.begin() + n, order.end(), by_key);
  order.resize(static_cast<std::size_t>(n));
  std::sort(order.begin(), order.end());
  return order;
}

SurveyDataset draw_informative_sample(const FinitePopulation& pop, Index n, Stream& rng) {
  const std::vector<Index> units = select_units(pop.inclusion_probs, n, rng);
  Vector weights(n), response(n);
  Matrix covariates(n, pop.kind == PopulationKind::Probit ? 1 : 0);
  for (Index i = 0; i < n; ++i) {
    const Index l = units[static_cast<std::size_t>(i)];
    weights[i] = 1.0 / pop.inclusion_probs[l];
    if (pop.kind == PopulationKind::Gaussian) {
      response[i] = pop.variables(l, 0);
    } else {
      covariates(i, 0) = pop.variables(l, 0);
      response[i] = pop.variables(l, 1);
    }
  }
  std::vector<std::string> names;
  if (pop.kind == PopulationKind::Probit) names.emplace_back("x");
  return SurveyDataset(std::move(covariates), std::move(response), std::move(weights), std::move(names));
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Pmle: return "pmle";
    case Method::Swlb: return "swlb";
    case Method::WlbNaive: return "wlb-naive";
    case Method::Unweighted: return "unweighted";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view text) {
  for (Method m : kAllMethods)
    if (to_string(m) == text) return m;
  return std::nullopt;
}

const MethodSummary& ReplicationReport::at(Method method) const {
  for (const auto& m : methods)
    if (m.method == method) return m;
  throw Error(ErrorCode::InvalidArgument, "method not present in report: " + std::string(to_string(method)));
}

MethodSummary aggregate(Method method, const std::vector<ReplicationOutcome>& outcomes, double truth) {
  MethodSummary s;
  s.method = method;
  s.replications = static_cast<int>(outcomes.size());
  double sq = 0.0, err = 0.0, width = 0.0;
  int covered = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++s.failure_reasons[o.failure];
      continue;
    }
    ++s.successes;
    const double e = o.estimate - truth;
    sq += e * e;
    err += e;
    width += o.upper - o.lower;
    if (o.lower <= truth && truth <= o.upper) ++covered;
  }
  if (s.successes > 0) {
    const double m = static_cast<double>(s.successes);
    s.mse = sq / m;
    s.bias = err / m;
    s.coverage = covered / m;
    s.mean_interval_width = width / m;
  }
  return s;
}

namespace {

ReplicationOutcome run_method(Method method, const LikelihoodModel& model, const SurveyDataset& data,
                              const ScaledWeights& scaled, const MonteCarloOptions& options, std::uint64_t seed,
                              Index target) {
  ReplicationOutcome out;
  try {
    switch (method) {
      case Method::Pmle:
      case Method::Unweighted: {
        const PmleFit fit = method == Method::Pmle ? fit_pmle(model, data, scaled) : fit_unweighted(model, data);
        const IntervalEstimate ci = wald_interval(fit, options.level);
        out.estimate = fit.theta_hat[target];
        out.lower = ci.lower[target];
        out.upper = ci.upper[target];
        break;
      }
      case Method::Swlb:
      case Method::WlbNaive: {
        BootstrapConfig config;
        config.b = options.bootstrap_replicates;
        config.seed = seed;
        config.scheme = method == Method::Swlb ? ResampleScheme::SurveyAdjusted : ResampleScheme::DirichletCentered;
        const BootstrapResult result = run_bootstrap_serial(model, data, scaled, config);
        const IntervalEstimate ui = percentile_interval(result, options.level);
        out.estimate = result.point_estimate[target];
        out.lower = ui.lower[target];
        out.upper = ui.upper[target];
        break;
      }
    }
    out.ok = true;
  } catch (const Error& e) {
    if (!is_numerical(e.code())) throw;
    out.failure = e.code();
  }
  return out;
}

}  // namespace

ReplicationReport run_monte_carlo(const ScenarioConfig& scenario, const MonteCarloOptions& options,
                                  std::string scenario_name) {
  std::visit([](const auto& c) { validate(c); }, scenario);
  if (options.methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods requested");
  if (!(options.level > 0.0 && options.level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  if (options.bootstrap_replicates < 2) throw Error(ErrorCode::InvalidArgument, "bootstrap_replicates must be >= 2");

  const bool gaussian = std::holds_alternative<Sim1Config>(scenario);
  const int replications = std::visit([](const auto& c) { return c.replications; }, scenario);
  const Index n = std::visit([](const auto& c) { return c.sample_size; }, scenario);
  const double truth = gaussian ? std::get<Sim1Config>(scenario).mu_x : std::get<Sim2Config>(scenario).beta;

  const GaussianMeanModel gaussian_model;
  const ProbitRegressionModel probit_model(false);
  const LikelihoodModel& model = gaussian ? static_cast<const LikelihoodModel&>(gaussian_model) : probit_model;

  const std::size_t num_methods = options.methods.size();
  std::vector<std::vector<ReplicationOutcome>> outcomes(num_methods,
                                                        std::vector<ReplicationOutcome>(static_cast<std::size_t>(replications)));
  std::exception_ptr error;
  const int team = options.threads > 0 ? options.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(team)
  for (int r = 0; r < replications; ++r) {
    try {
      const auto rep = static_cast<std::uint64_t>(r);
      Stream population_rng(derive_seed(options.master_seed, {rep, kPopulationStage}), 0);
      const FinitePopulation population =
          gaussian ? generate_population_sim1(std::get<Sim1Config>(scenario), population_rng)
                   : generate_population_sim2(std::get<Sim2Config>(scenario), population_rng);
      Stream sample_rng(derive_seed(options.master_seed, {rep, kSampleStage}), 0);
      const SurveyDataset data = draw_informative_sample(population, n, sample_rng);
      const ScaledWeights scaled = scale_weights(data.raw_weights());
      for (std::size_t m = 0; m < num_methods; ++m) {
        const Method method = options.methods[m];
        const std::uint64_t seed =
            derive_seed(options.master_seed, {rep, kMethodStageBase + static_cast<std::uint64_t>(method)});
        outcomes[m][static_cast<std::size_t>(r)] = run_method(method, model, data, scaled, options, seed, 0);
      }
    } catch (...) {
#pragma omp critical(swlb_monte_carlo_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  ReplicationReport report;
  report.scenario_name = std::move(scenario_name);
  report.scenario = scenario;
  report.truth = truth;
  report.options = options;
  for (std::size_t m = 0; m < num_methods; ++m) {
    MethodSummary summary = aggregate(options.methods[m], outcomes[m], truth);
    if (summary.failures() > options.max_failure_fraction * replications)
      throw Error(ErrorCode::TooManyFailures, std::string(to_string(summary.method)) + " failed in " +
                                                  std::to_string(summary.failures()) + " of " +
                                                  std::to_string(replications) + " replications");
    report.methods.push_back(std::move(summary));
  }
  return report;
}

}  // namespace swlb
