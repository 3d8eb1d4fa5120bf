#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swlb/error.hpp"
#include "swlb/rng.hpp"
#include "swlb/survey_data.hpp"
#include "swlb/types.hpp"

namespace swlb {

// Gaussian mean scenario: (X*, Z) bivariate normal, target mu_x.
struct Sim1Config {
  Index population_size = 20000;
  Index sample_size = 500;
  double mu_x = 10.0;
  double mu_z = 0.0;
  double sigma_x = 4.0;
  double sigma_z = 3.0;
  double rho = 0.2;
  double b0 = -1.8;
  double b1 = 0.0;
  int replications = 100;
};

// Probit scenario: X* ~ N(mu_x, sigma_x2), (V, Z) bivariate normal with mean
// (X* beta, mu_z), Y* = 1(V > 0); target beta (no intercept).
struct Sim2Config {
  Index population_size = 20000;
  Index sample_size = 500;
  double beta = 0.1;
  double mu_x = 1.0;
  double mu_z = 0.0;
  double sigma_x2 = 0.01;
  double sigma_v2 = 1.0;
  double sigma_z2 = 1.0;
  double rho = 0.2;
  double b0 = -1.8;
  double b1 = 0.0;
  int replications = 100;
};

using ScenarioConfig = std::variant<Sim1Config, Sim2Config>;

// Throws ConfigError naming the first violated constraint.
void validate(const Sim1Config& config);
void validate(const Sim2Config& config);

enum class PopulationKind { Gaussian, Probit };

struct FinitePopulation {
  PopulationKind kind = PopulationKind::Gaussian;
  // Gaussian: columns (X*, Z). Probit: columns (X*, Y*, Z).
  Matrix variables;
  Vector inclusion_probs;
};

// pi_l = Phi(b0 + b1 z_l).
Vector inclusion_probabilities(const Vector& z, double b0, double b1);

FinitePopulation generate_population_sim1(const Sim1Config& config, Stream& rng);
FinitePopulation generate_population_sim2(const Sim2Config& config, Stream& rng);

// Successive sampling: n sequential draws without replacement, each with
// probability proportional to `size` among the units not yet drawn. Realized
// through exponential keys E_l / size_l (the n smallest win), which has the same
// law. Returns ascending unit indices.
std::vector<Index> select_units(const Vector& size, Index n, Stream& rng);

// Selected units with raw weights 1 / pi_l. Gaussian: response = X*.
// Probit: covariate "x" = X*, response = Y*.
SurveyDataset draw_informative_sample(const FinitePopulation& population, Index n, Stream& rng);

enum class Method { Pmle, Swlb, WlbNaive, Unweighted };
std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);
inline const std::vector<Method> kAllMethods{Method::Pmle, Method::Swlb, Method::WlbNaive, Method::Unweighted};

struct MonteCarloOptions {
  std::vector<Method> methods = kAllMethods;
  double level = 0.95;
  int bootstrap_replicates = 2000;
  std::uint64_t master_seed = 0;
  int threads = 0;                    // <= 0: runtime default
  double max_failure_fraction = 0.05; // per method, across replications
};

struct MethodSummary {
  Method method = Method::Pmle;
  int replications = 0;
  int successes = 0;
  double mse = 0.0;
  double bias = 0.0;
  double coverage = 0.0;
  double mean_interval_width = 0.0;
  std::map<ErrorCode, int> failure_reasons;
  int failures() const noexcept { return replications - successes; }
};

struct ReplicationReport {
  std::string scenario_name;
  ScenarioConfig scenario;
  double truth = 0.0;
  MonteCarloOptions options;
  std::vector<MethodSummary> methods;

  const MethodSummary& at(Method method) const;
};

// Per-replication outcome of one method, before aggregation.
struct ReplicationOutcome {
  bool ok = false;
  ErrorCode failure = ErrorCode::NonConvergence;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Aggregates outcomes into a summary: mse and bias over successful
// replications; coverage = fraction of successful replications whose interval
// contains the truth.
MethodSummary aggregate(Method method, const std::vector<ReplicationOutcome>& outcomes, double truth);

// Replication r draws its population from derive_seed(master, {r, 0}), its
// sample from {r, 1} and each method's bootstrap from {r, 16 + method}, so a
// method's results do not depend on which other methods run alongside it, and
// the population does not depend on the sample size. Throws TooManyFailures
// when a method fails in more than max_failure_fraction of replications.
ReplicationReport run_monte_carlo(const ScenarioConfig& scenario, const MonteCarloOptions& options,
                                  std::string scenario_name = {});

}  // namespace swlb
