#include "swlb/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <omp.h>

namespace swlb {

namespace {

inline constexpr int kMinPercentileDraws = 20;

void check_inputs(const LikelihoodModel& model, const SurveyDataset& data, const ScaledWeights& scaled,
                  const BootstrapConfig& config) {
  if (config.b < 2) throw Error(ErrorCode::InvalidArgument, "bootstrap needs b >= 2 replicates");
  if (!(config.max_failures_fraction >= 0.0 && config.max_failures_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "max_failures_fraction must lie in [0, 1)");
  if (scaled.size() != data.size())
    throw Error(ErrorCode::InvalidArgument, "scaled weights do not match the dataset");
  model.check_data(data);
}

struct Replicate {
  std::optional<Vector> theta;
  ErrorCode failure = ErrorCode::NonConvergence;
};

// One replicate: numerical failures are captured, everything else propagates.
Replicate run_replicate(const LikelihoodModel& model, const SurveyDataset& data, const ScaledWeights& scaled,
                        const BootstrapConfig& config, int j) {
  Replicate out;
  try {
    Stream rng(config.seed, static_cast<std::uint64_t>(j));
    const NormalizedWeights g = draw_weights(config.scheme, scaled, rng);
    out.theta = model.fit(data, g.values);
  } catch (const Error& e) {
    if (!is_numerical(e.code())) throw;
    out.failure = e.code();
  }
  return out;
}

BootstrapResult collect(std::vector<Replicate>& slots, Index k, const BootstrapConfig& config) {
  BootstrapResult result;
  result.config = config;
  Index ok = 0;
  for (const auto& slot : slots) ok += slot.theta ? 1 : 0;
  result.draws.resize(ok, k);
  Index row = 0;
  for (int j = 0; j < static_cast<int>(slots.size()); ++j) {
    if (slots[j].theta) {
      result.draws.row(row++) = slots[j].theta->transpose();
    } else {
      result.failed_replicates.push_back(j);
      ++result.failure_reasons[slots[j].failure];
    }
  }
  if (result.failures() > config.max_failures_fraction * config.b || ok < 2) {
    std::string reasons;
    for (const auto& [code, count] : result.failure_reasons)
      reasons += std::string(reasons.empty() ? "" : ", ") + std::string(to_string(code)) + "=" + std::to_string(count);
    throw Error(ErrorCode::TooManyFailures, std::to_string(result.failures()) + " of " + std::to_string(config.b) +
                                                " bootstrap replicates failed (" + reasons + ")");
  }
  result.point_estimate = result.draws.colwise().mean().transpose();
  return result;
}

}  // namespace

BootstrapResult run_bootstrap(const LikelihoodModel& model, const SurveyDataset& data, const ScaledWeights& scaled,
                              const BootstrapConfig& config, int threads) {
  check_inputs(model, data, scaled, config);
  std::vector<Replicate> slots(static_cast<std::size_t>(config.b));
  std::exception_ptr error;
  const int team = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 4) num_threads(team)
  for (int j = 0; j < config.b; ++j) {
    try {
      slots[static_cast<std::size_t>(j)] = run_replicate(model, data, scaled, config, j);
    } catch (...) {
#pragma omp critical(swlb_bootstrap_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return collect(slots, model.param_dim(data), config);
}

BootstrapResult run_bootstrap_serial(const LikelihoodModel& model, const SurveyDataset& data,
                                     const ScaledWeights& scaled, const BootstrapConfig& config) {
  check_inputs(model, data, scaled, config);
  std::vector<Replicate> slots;
  slots.reserve(static_cast<std::size_t>(config.b));
  for (int j = 0; j < config.b; ++j) slots.push_back(run_replicate(model, data, scaled, config, j));
  return collect(slots, model.param_dim(data), config);
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

IntervalEstimate percentile_interval(const BootstrapResult& result, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  if (result.successes() < kMinPercentileDraws)
    throw Error(ErrorCode::TooFewDraws, "percentile interval needs at least 20 successful draws");
  const Index k = result.draws.cols();
  IntervalEstimate out{Vector(k), Vector(k), level, IntervalMethod::Percentile};
  std::vector<double> column(static_cast<std::size_t>(result.successes()));
  for (Index c = 0; c < k; ++c) {
    Eigen::Map<Vector>(column.data(), result.successes()) = result.draws.col(c);
    std::sort(column.begin(), column.end());
    out.lower[c] = quantile_type7(column, 0.5 * (1.0 - level));
    out.upper[c] = quantile_type7(column, 0.5 * (1.0 + level));
  }
  return out;
}

DrawSummary summarize(const BootstrapResult& result) {
  if (result.successes() < 2) throw Error(ErrorCode::TooFewDraws, "summary needs at least 2 draws");
  const Vector mean = result.draws.colwise().mean().transpose();
  const Matrix centred = result.draws.rowwise() - mean.transpose();
  const Vector sd = (centred.array().square().colwise().sum() / static_cast<double>(result.successes() - 1))
                        .sqrt()
                        .transpose();
  return {mean, sd};
}

}  // namespace swlb
