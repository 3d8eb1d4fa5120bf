#pragma once

#include <string_view>

#include "swlb/models.hpp"
#include "swlb/survey_data.hpp"
#include "swlb/types.hpp"

namespace swlb {

// Pseudo-maximum-likelihood fit with its sandwich covariance
//   J = -(1/n) sum w~_i psi'_i(theta^),  I = (1/n) sum w~_i^2 psi_i psi_i^T,
//   cov = (1/n) J^{-1} I J^{-1}.
struct PmleFit {
  Vector theta_hat;
  Matrix sandwich_cov;
  Matrix j_matrix;
  Matrix i_matrix;
  Index n = 0;
};

enum class IntervalMethod { Wald, Percentile };
std::string_view to_string(IntervalMethod method);

struct IntervalEstimate {
  Vector lower;
  Vector upper;
  double level = 0.95;
  IntervalMethod method = IntervalMethod::Wald;

  bool contains(Index k, double value) const { return lower[k] <= value && value <= upper[k]; }
};

inline constexpr double kMaxConditionNumber = 1e12;

// Inverse of a symmetric positive-definite matrix via its eigendecomposition.
// Throws SingularInformation when it is not positive definite or its
// condition number exceeds 1e12.
Matrix invert_information(const Matrix& j);

PmleFit fit_pmle(const LikelihoodModel& model, const SurveyDataset& data, const ScaledWeights& scaled);

// Same pipeline with w~ = 1: the ordinary MLE with its robust covariance.
PmleFit fit_unweighted(const LikelihoodModel& model, const SurveyDataset& data);

// theta^_k -/+ z_{(1+level)/2} sqrt(cov_kk).
IntervalEstimate wald_interval(const PmleFit& fit, double level);

}  // namespace swlb
