#include "swlb/weight_resampler.hpp"

#include <cmath>

#include <omp.h>

#include "swlb/error.hpp"
#include "swlb/normal.hpp"

namespace swlb {

namespace {

constexpr int kZeroRedraws = 64;

template <class Draw>
double positive_draw(Draw&& draw) {
  for (int attempt = 0; attempt < kZeroRedraws; ++attempt) {
    const double y = draw();
    if (y > 0.0) return y;
  }
  throw Error(ErrorCode::DegenerateDraw, "gamma draw underflowed to zero repeatedly");
}

}  // namespace

std::string_view to_string(ResampleScheme scheme) {
  switch (scheme) {
    case ResampleScheme::SurveyAdjusted: return "survey-adjusted";
    case ResampleScheme::UniformDirichlet: return "uniform-dirichlet";
    case ResampleScheme::DirichletCentered: return "dirichlet-centered";
  }
  return "unknown";
}

std::optional<ResampleScheme> parse_scheme(std::string_view text) {
  if (text == "survey-adjusted") return ResampleScheme::SurveyAdjusted;
  if (text == "uniform-dirichlet") return ResampleScheme::UniformDirichlet;
  if (text == "dirichlet-centered") return ResampleScheme::DirichletCentered;
  return std::nullopt;
}

UnnormalizedWeights draw_unnormalized(const ScaledWeights& scaled, Stream& rng) {
  return draw_unnormalized(ResampleScheme::SurveyAdjusted, scaled, rng);
}

UnnormalizedWeights draw_unnormalized(ResampleScheme scheme, const ScaledWeights& scaled, Stream& rng) {
  const Index n = scaled.size();
  Vector y(n);
  switch (scheme) {
    case ResampleScheme::SurveyAdjusted:
      for (Index i = 0; i < n; ++i) y[i] = positive_draw([&] { return rng.exponential(scaled[i]); });
      break;
    case ResampleScheme::UniformDirichlet:
      for (Index i = 0; i < n; ++i) y[i] = positive_draw([&] { return rng.exponential(1.0); });
      break;
    case ResampleScheme::DirichletCentered:
      for (Index i = 0; i < n; ++i) y[i] = positive_draw([&] { return rng.gamma(scaled[i]); });
      break;
  }
  return {std::move(y)};
}

NormalizedWeights normalize(const UnnormalizedWeights& y) {
  const double total = compensated_sum({y.values.data(), static_cast<std::size_t>(y.values.size())});
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error(ErrorCode::DegenerateDraw, "un-normalized weights do not have a positive finite sum");
  return {y.values / total};
}

NormalizedWeights draw_weights(ResampleScheme scheme, const ScaledWeights& scaled, Stream& rng) {
  for (int attempt = 0;; ++attempt) {
    try {
      return normalize(draw_unnormalized(scheme, scaled, rng));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateDraw || attempt + 1 >= kDegenerateDrawRetries) throw;
    }
  }
}

namespace {

// Sums of powers of deviations from a fixed centre, per coordinate.
struct PowerSums {
  Vector s1, s2, s3, s4;
  explicit PowerSums(Index n) : s1(Vector::Zero(n)), s2(Vector::Zero(n)), s3(Vector::Zero(n)), s4(Vector::Zero(n)) {}
  void add(const Vector& x, const Vector& centre) {
    const Eigen::ArrayXd d = (x - centre).array();
    const Eigen::ArrayXd d2 = d * d;
    s1.array() += d;
    s2.array() += d2;
    s3.array() += d2 * d;
    s4.array() += d2 * d2;
  }
  void merge(const PowerSums& o) {
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    s4 += o.s4;
  }
};

struct Moments {
  double mean, mean_se, variance, variance_se;
};

Moments moments_from_sums(const PowerSums& sums, Index i, double centre, double m) {
  const double a1 = sums.s1[i] / m, a2 = sums.s2[i] / m, a3 = sums.s3[i] / m, a4 = sums.s4[i] / m;
  const double mu2 = a2 - a1 * a1;
  const double mu4 = a4 - 4.0 * a3 * a1 + 6.0 * a2 * a1 * a1 - 3.0 * a1 * a1 * a1 * a1;
  const double variance = mu2 * m / (m - 1.0);
  return {centre + a1, std::sqrt(std::max(variance, 0.0) / m), variance,
          std::sqrt(std::max(mu4 - mu2 * mu2, 0.0) / m)};
}

}  // namespace

WeightDiagnostics weight_moment_diagnostics(ResampleScheme scheme, const ScaledWeights& scaled,
                                            std::int64_t draws, std::uint64_t seed, int threads) {
  if (draws < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 draws are required");
  constexpr std::int64_t kChunk = 1000;
  const Index n = scaled.size();
  const std::int64_t chunks = (draws + kChunk - 1) / kChunk;
  const Vector centre = scaled.values();
  const Vector normalized_centre = centre / static_cast<double>(n);

  std::vector<PowerSums> raw(static_cast<std::size_t>(chunks), PowerSums(n));
  std::vector<PowerSums> normalized(static_cast<std::size_t>(chunks), PowerSums(n));

#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t end = std::min(draws, (c + 1) * kChunk);
    for (std::int64_t j = c * kChunk; j < end; ++j) {
      Stream rng(seed, static_cast<std::uint64_t>(j));
      const UnnormalizedWeights y = draw_unnormalized(scheme, scaled, rng);
      raw[static_cast<std::size_t>(c)].add(y.values, centre);
      normalized[static_cast<std::size_t>(c)].add(normalize(y).values, normalized_centre);
    }
  }
  for (std::int64_t c = 1; c < chunks; ++c) {
    raw[0].merge(raw[static_cast<std::size_t>(c)]);
    normalized[0].merge(normalized[static_cast<std::size_t>(c)]);
  }

  WeightDiagnostics out;
  out.scheme = scheme;
  out.draws = draws;
  out.seed = seed;
  out.z_threshold = normal_quantile(1.0 - 1e-3 / (4.0 * static_cast<double>(n)));
  out.mean_condition = true;
  out.variance_condition = true;
  const double m = static_cast<double>(draws);
  for (Index i = 0; i < n; ++i) {
    CoordinateMoments cm;
    cm.target_mean = centre[i];
    cm.target_variance = centre[i] * centre[i];
    const Moments y = moments_from_sums(raw[0], i, centre[i], m);
    const Moments g = moments_from_sums(normalized[0], i, normalized_centre[i], m);
    cm.mean = y.mean;
    cm.mean_se = y.mean_se;
    cm.variance = y.variance;
    cm.variance_se = y.variance_se;
    cm.normalized_mean = g.mean;
    cm.normalized_mean_se = g.mean_se;
    cm.normalized_variance = g.variance;
    cm.normalized_variance_se = g.variance_se;
    cm.mean_ok = std::abs(cm.mean - cm.target_mean) <= out.z_threshold * cm.mean_se;
    cm.variance_ok = std::abs(cm.variance - cm.target_variance) <= out.z_threshold * cm.variance_se;
    out.mean_condition = out.mean_condition && cm.mean_ok;
    out.variance_condition = out.variance_condition && cm.variance_ok;
    out.coordinates.push_back(cm);
  }
  return out;
}

}  // namespace swlb
