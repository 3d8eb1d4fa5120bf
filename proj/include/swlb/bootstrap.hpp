#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "swlb/error.hpp"
#include "swlb/estimators.hpp"
#include "swlb/models.hpp"
#include "swlb/weight_resampler.hpp"

namespace swlb {

struct BootstrapConfig {
  int b = 2000;
  std::uint64_t seed = 0;
  ResampleScheme scheme = ResampleScheme::SurveyAdjusted;
  double max_failures_fraction = 0.01;
};

struct BootstrapResult {
  Matrix draws;  // B' x K, successful replicates in replicate order
  std::vector<int> failed_replicates;
  std::map<ErrorCode, int> failure_reasons;
  Vector point_estimate;  // mean of draws
  BootstrapConfig config;

  int failures() const noexcept { return static_cast<int>(failed_replicates.size()); }
  Index successes() const noexcept { return draws.rows(); }
};

// Weighted likelihood bootstrap. Replicate j draws its weights from
// Stream(config.seed, j) and maximizes sum_i g_i log f_theta(X_i). Replicates
// run on an OpenMP team of `threads` (<= 0: runtime default); results land in
// replicate-indexed slots, so the output does not depend on the team size.
// Throws TooManyFailures when failed replicates exceed max_failures_fraction.
BootstrapResult run_bootstrap(const LikelihoodModel& model, const SurveyDataset& data,
                              const ScaledWeights& scaled, const BootstrapConfig& config, int threads = 0);

// Single-threaded reference of run_bootstrap; kept for testing the parallel path.
BootstrapResult run_bootstrap_serial(const LikelihoodModel& model, const SurveyDataset& data,
                                     const ScaledWeights& scaled, const BootstrapConfig& config);

// Type-7 quantile of an ascending-sorted sample: interpolation at h = (m-1)p.
double quantile_type7(std::span<const double> sorted, double p);

// Per-coordinate (1-level)/2 and (1+level)/2 type-7 quantiles of the draws.
// Throws TooFewDraws below 20 successful replicates.
IntervalEstimate percentile_interval(const BootstrapResult& result, double level);

struct DrawSummary {
  Vector mean;
  Vector sd;  // B'-1 denominator
};
DrawSummary summarize(const BootstrapResult& result);

}  // namespace swlb
