#include "swlb/estimators.hpp"

#include <cmath>

#include "swlb/error.hpp"
#include "swlb/normal.hpp"

namespace swlb {

std::string_view to_string(IntervalMethod method) {
  return method == IntervalMethod::Wald ? "wald" : "percentile";
}

Matrix invert_information(const Matrix& j) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (j + j.transpose()));
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::SingularInformation, "eigendecomposition of J failed");
  const Vector& values = eig.eigenvalues();  // ascending
  const double smallest = values[0];
  const double largest = values[values.size() - 1];
  if (!(smallest > 0.0) || !(largest / smallest <= kMaxConditionNumber))
    throw Error(ErrorCode::SingularInformation,
                "J is singular or ill-conditioned (eigenvalues " + std::to_string(smallest) + " .. " +
                    std::to_string(largest) + ")");
  return eig.eigenvectors() * values.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

PmleFit fit_pmle(const LikelihoodModel& model, const SurveyDataset& data, const ScaledWeights& scaled) {
  if (scaled.size() != data.size())
    throw Error(ErrorCode::InvalidArgument, "scaled weights do not match the dataset");
  model.check_data(data);
  const Vector& w = scaled.values();
  const double n = static_cast<double>(data.size());

  PmleFit fit;
  fit.n = data.size();
  fit.theta_hat = weighted_mle(model, data, w);

  const Evaluation eval = model.evaluate(data, w, fit.theta_hat, Derivatives::Hessian);
  const double tol = score_tolerance(data.size(), w.sum());
  if (!(eval.gradient.cwiseAbs().maxCoeff() < tol))
    throw Error(ErrorCode::NonConvergence, "weighted score at the fitted value exceeds tolerance");

  fit.j_matrix = -eval.hessian / n;
  const Matrix psi = model.score_matrix(data, fit.theta_hat);
  fit.i_matrix = psi.transpose() * w.array().square().matrix().asDiagonal() * psi / n;

  const Matrix j_inv = invert_information(fit.j_matrix);
  const Matrix cov = j_inv * fit.i_matrix * j_inv / n;
  fit.sandwich_cov = 0.5 * (cov + cov.transpose());
  return fit;
}

PmleFit fit_unweighted(const LikelihoodModel& model, const SurveyDataset& data) {
  return fit_pmle(model, data, ScaledWeights::unit(data.size()));
}

IntervalEstimate wald_interval(const PmleFit& fit, double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  const double z = normal_quantile(0.5 * (1.0 + level));
  const Vector half = z * fit.sandwich_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return {fit.theta_hat - half, fit.theta_hat + half, level, IntervalMethod::Wald};
}

}  // namespace swlb
