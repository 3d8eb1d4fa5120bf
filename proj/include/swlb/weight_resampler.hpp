#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swlb/rng.hpp"
#include "swlb/survey_data.hpp"
#include "swlb/types.hpp"

namespace swlb {

// How the random likelihood weights of each bootstrap replicate are drawn.
//   SurveyAdjusted    Y_i ~ Gamma(1, scale w~_i) independently, g = Y / sum Y
//   UniformDirichlet  g ~ Dirichlet(1, ..., 1), the classical WLB
//   DirichletCentered g ~ Dirichlet(w~_1, ..., w~_n); matches the mean of the
//                     survey weights but not their variance (negative control)
enum class ResampleScheme { SurveyAdjusted, UniformDirichlet, DirichletCentered };

std::string_view to_string(ResampleScheme scheme);
std::optional<ResampleScheme> parse_scheme(std::string_view text);

struct UnnormalizedWeights {
  Vector values;
};

struct NormalizedWeights {
  Vector values;
};

// Y_i ~ Gamma(shape 1, scale w~_i), i.e. exponential with mean w~_i.
UnnormalizedWeights draw_unnormalized(const ScaledWeights& scaled, Stream& rng);

// Un-normalized draw of any scheme (Gamma(1,1) for UniformDirichlet,
// Gamma(w~_i, 1) for DirichletCentered). Exact zeros are redrawn.
UnnormalizedWeights draw_unnormalized(ResampleScheme scheme, const ScaledWeights& scaled, Stream& rng);

// g_i = y_i / sum_k y_k. Throws DegenerateDraw if the sum is not positive and finite.
NormalizedWeights normalize(const UnnormalizedWeights& y);

// One normalized weight vector; DegenerateDraw is retried 3 times before surfacing.
NormalizedWeights draw_weights(ResampleScheme scheme, const ScaledWeights& scaled, Stream& rng);

inline constexpr int kDegenerateDrawRetries = 3;

// Monte Carlo check of the weight moment conditions E(Y_i) = w~_i and
// Var(Y_i) = w~_i^2, with per-coordinate standard errors.
struct CoordinateMoments {
  double target_mean = 0.0;
  double target_variance = 0.0;
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
  double normalized_mean = 0.0;
  double normalized_mean_se = 0.0;
  double normalized_variance = 0.0;
  double normalized_variance_se = 0.0;
  bool mean_ok = false;
  bool variance_ok = false;
};

struct WeightDiagnostics {
  ResampleScheme scheme = ResampleScheme::SurveyAdjusted;
  std::int64_t draws = 0;
  std::uint64_t seed = 0;
  double z_threshold = 0.0;  // Bonferroni-adjusted, family-wise error 1e-3
  std::vector<CoordinateMoments> coordinates;
  bool mean_condition = false;
  bool variance_condition = false;
};

// Draw j uses Stream(seed, j). Draws are accumulated in fixed-size chunks that
// are merged in index order, so the result does not depend on `threads`.
WeightDiagnostics weight_moment_diagnostics(ResampleScheme scheme, const ScaledWeights& scaled,
                                            std::int64_t draws, std::uint64_t seed, int threads);

}  // namespace swlb
