#include "swlb/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "swlb/error.hpp"
#include "swlb/normal.hpp"

namespace swlb {

// ---------------------------------------------------------------------------
// Generic pieces

Evaluation LikelihoodModel::evaluate(const SurveyDataset& data, const Vector& weights, const Vector& theta,
                                     Derivatives order) const {
  const Index k = param_dim(data);
  Evaluation out;
  if (order != Derivatives::Value) out.gradient = Vector::Zero(k);
  if (order == Derivatives::Hessian) out.hessian = Matrix::Zero(k, k);
  for (Index i = 0; i < data.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    out.value += w * log_density(data, i, theta);
    if (order != Derivatives::Value) out.gradient += w * score(data, i, theta);
    if (order == Derivatives::Hessian) out.hessian += w * hessian(data, i, theta);
  }
  return out;
}

Matrix LikelihoodModel::score_matrix(const SurveyDataset& data, const Vector& theta) const {
  Matrix out(data.size(), param_dim(data));
  for (Index i = 0; i < data.size(); ++i) out.row(i) = score(data, i, theta).transpose();
  return out;
}

double score_tolerance(Index n, double weight_sum) {
  const double scale = std::max(1.0, static_cast<double>(n));
  return 1e-8 * scale * std::min(1.0, weight_sum / scale);
}

namespace {

void check_weight_vector(const SurveyDataset& data, const Vector& weights) {
  if (weights.size() != data.size())
    throw Error(ErrorCode::InvalidArgument, "weight vector length does not match the dataset");
  if (!weights.allFinite() || (weights.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
  if (!(weights.sum() > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights are all zero");
}

// Ascent direction: Newton when -H is positive definite, otherwise the
// gradient scaled by the Hessian diagonal.
Vector ascent_direction(const Evaluation& eval) {
  const Matrix neg_h = -eval.hessian;
  Eigen::LLT<Matrix> llt(neg_h);
  if (llt.info() == Eigen::Success) {
    Vector step = llt.solve(eval.gradient);
    if (step.allFinite() && step.dot(eval.gradient) > 0.0) return step;
  }
  const double scale = std::max(neg_h.diagonal().cwiseAbs().maxCoeff(), 1e-12);
  return eval.gradient / scale;
}

}  // namespace

Vector newton_mle(const LikelihoodModel& model, const SurveyDataset& data, const Vector& weights, Vector theta,
                  const NewtonOptions& options) {
  check_weight_vector(data, weights);
  if (!model.in_domain(theta)) throw Error(ErrorCode::DomainError, "starting value outside the parameter space");
  const double tol = score_tolerance(data.size(), weights.sum());

  Evaluation current = model.evaluate(data, weights, theta, Derivatives::Hessian);
  bool converged = false;
  int polish_left = 1;
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    const double grad_norm = current.gradient.cwiseAbs().maxCoeff();
    if (grad_norm <= tol) {
      converged = true;
      if (polish_left-- <= 0) break;
    }

    const Vector direction = ascent_direction(current);
    const double slack = 1e-13 * (1.0 + std::abs(current.value));
    bool accepted = false;
    double step = 1.0;
    for (int halving = 0; halving <= options.max_halvings; ++halving, step *= 0.5) {
      const Vector candidate = theta + step * direction;
      if (!model.in_domain(candidate)) continue;
      Evaluation trial = model.evaluate(data, weights, candidate, Derivatives::Hessian);
      if (!std::isfinite(trial.value) || trial.value < current.value - slack) continue;
      if (converged && trial.gradient.cwiseAbs().maxCoeff() >= grad_norm) break;
      theta = candidate;
      current = std::move(trial);
      accepted = true;
      break;
    }
    if (options.separation_bound > 0.0 && theta.cwiseAbs().maxCoeff() > options.separation_bound)
      throw Error(ErrorCode::Separation, "coefficients diverged past the separation bound; no finite maximizer");
    if (!accepted) break;
  }
  if (!converged && current.gradient.cwiseAbs().maxCoeff() <= tol) converged = true;
  if (!converged)
    throw Error(ErrorCode::NonConvergence,
                "Newton iterations stopped with weighted score norm " +
                    std::to_string(current.gradient.cwiseAbs().maxCoeff()));
  return theta;
}

double weighted_log_likelihood(const LikelihoodModel& model, const SurveyDataset& data, const Vector& weights,
                               const Vector& theta) {
  if (weights.size() != data.size())
    throw Error(ErrorCode::InvalidArgument, "weight vector length does not match the dataset");
  if (theta.size() != model.param_dim(data) || !model.in_domain(theta))
    throw Error(ErrorCode::DomainError, "parameter outside the model's domain");
  return model.evaluate(data, weights, theta, Derivatives::Value).value;
}

Vector weighted_mle(const LikelihoodModel& model, const SurveyDataset& data, const Vector& weights) {
  check_weight_vector(data, weights);
  return model.fit(data, weights);
}

// ---------------------------------------------------------------------------
// Gaussian mean model

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

void GaussianMeanModel::check_data(const SurveyDataset& data) const {
  if (!data.has_response())
    throw Error(ErrorCode::InvalidArgument, "gaussian-mean model needs an outcome column");
}

bool GaussianMeanModel::in_domain(const Vector& theta) const {
  return theta.size() == 2 && theta.allFinite() && theta[1] > 0.0;
}

double GaussianMeanModel::log_density(const SurveyDataset& data, Index i, const Vector& theta) const {
  const double r = data.response()[i] - theta[0];
  return -0.5 * (kLog2Pi + std::log(theta[1])) - r * r / (2.0 * theta[1]);
}

Vector GaussianMeanModel::score(const SurveyDataset& data, Index i, const Vector& theta) const {
  const double r = data.response()[i] - theta[0];
  const double s2 = theta[1];
  Vector g(2);
  g << r / s2, r * r / (2.0 * s2 * s2) - 1.0 / (2.0 * s2);
  return g;
}

Matrix GaussianMeanModel::hessian(const SurveyDataset& data, Index i, const Vector& theta) const {
  const double r = data.response()[i] - theta[0];
  const double s2 = theta[1];
  const double s4 = s2 * s2;
  Matrix h(2, 2);
  h << -1.0 / s2, -r / s4, -r / s4, -r * r / (s4 * s2) + 1.0 / (2.0 * s4);
  return h;
}

Evaluation GaussianMeanModel::evaluate(const SurveyDataset& data, const Vector& weights, const Vector& theta,
                                       Derivatives order) const {
  const Vector& x = data.response();
  const double mu = theta[0];
  const double s2 = theta[1];
  double s0 = 0.0, s1 = 0.0, sq = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double r = x[i] - mu;
    s0 += weights[i];
    s1 += weights[i] * r;
    sq += weights[i] * r * r;
  }
  Evaluation out;
  out.value = -0.5 * s0 * (kLog2Pi + std::log(s2)) - sq / (2.0 * s2);
  const double s4 = s2 * s2;
  if (order != Derivatives::Value) {
    out.gradient.resize(2);
    out.gradient << s1 / s2, sq / (2.0 * s4) - s0 / (2.0 * s2);
  }
  if (order == Derivatives::Hessian) {
    out.hessian.resize(2, 2);
    out.hessian << -s0 / s2, -s1 / s4, -s1 / s4, -sq / (s4 * s2) + s0 / (2.0 * s4);
  }
  return out;
}

Matrix GaussianMeanModel::score_matrix(const SurveyDataset& data, const Vector& theta) const {
  const Eigen::ArrayXd r = data.response().array() - theta[0];
  const double s2 = theta[1];
  Matrix out(data.size(), 2);
  out.col(0) = (r / s2).matrix();
  out.col(1) = (r * r / (2.0 * s2 * s2) - 1.0 / (2.0 * s2)).matrix();
  return out;
}

Vector GaussianMeanModel::fit(const SurveyDataset& data, const Vector& weights) const {
  const Vector& x = data.response();
  const double total = weights.sum();
  const double mu = weights.dot(x) / total;
  const double variance = weights.dot((x.array() - mu).square().matrix()) / total;

  const double plain_mean = x.mean();
  const double sample_variance = (x.array() - plain_mean).square().sum() / static_cast<double>(x.size() - 1);
  if (!(variance > 1e-12 * sample_variance))
    throw Error(ErrorCode::DegenerateVariance, "weighted variance collapsed below 1e-12 of the sample variance");
  Vector theta(2);
  theta << mu, variance;
  return theta;
}

Vector GaussianMeanModel::start_value(const SurveyDataset& data, const Vector&) const {
  const Vector& x = data.response();
  const double mean = x.mean();
  Vector theta(2);
  theta << mean, (x.array() - mean).square().mean();
  return theta;
}

// ---------------------------------------------------------------------------
// Probit regression

namespace {
constexpr double kSeparationBound = 1e3;
}

Index ProbitRegressionModel::param_dim(const SurveyDataset& data) const {
  return data.num_covariates() + (intercept_ ? 1 : 0);
}

std::vector<std::string> ProbitRegressionModel::param_names(const SurveyDataset& data) const {
  std::vector<std::string> names;
  if (intercept_) names.emplace_back("(Intercept)");
  for (const auto& name : data.covariate_names()) names.push_back(name);
  return names;
}

void ProbitRegressionModel::check_data(const SurveyDataset& data) const {
  if (!data.has_response()) throw Error(ErrorCode::InvalidArgument, "probit model needs a response column");
  if (param_dim(data) == 0) throw Error(ErrorCode::InvalidArgument, "probit model has no parameters");
  const Vector& y = data.response();
  for (Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0 && y[i] != 1.0)
      throw Error(ErrorCode::InvalidArgument,
                  "probit response must be 0 or 1 (row " + std::to_string(i + 1) + ")", static_cast<std::size_t>(i + 1));
}

double ProbitRegressionModel::design(const SurveyDataset& data, Index i, Index k) const {
  if (intercept_) return k == 0 ? 1.0 : data.covariates()(i, k - 1);
  return data.covariates()(i, k);
}

double ProbitRegressionModel::linear_predictor(const SurveyDataset& data, Index i, const Vector& beta) const {
  double eta = 0.0;
  for (Index k = 0; k < beta.size(); ++k) eta += design(data, i, k) * beta[k];
  return eta;
}

double ProbitRegressionModel::log_density(const SurveyDataset& data, Index i, const Vector& theta) const {
  const double sign = data.response()[i] == 1.0 ? 1.0 : -1.0;
  return normal_log_cdf(sign * linear_predictor(data, i, theta));
}

Vector ProbitRegressionModel::score(const SurveyDataset& data, Index i, const Vector& theta) const {
  const double sign = data.response()[i] == 1.0 ? 1.0 : -1.0;
  const double ratio = inverse_mills_ratio(sign * linear_predictor(data, i, theta));
  Vector g(theta.size());
  for (Index k = 0; k < theta.size(); ++k) g[k] = sign * ratio * design(data, i, k);
  return g;
}

Matrix ProbitRegressionModel::hessian(const SurveyDataset& data, Index i, const Vector& theta) const {
  const double sign = data.response()[i] == 1.0 ? 1.0 : -1.0;
  const double t = sign * linear_predictor(data, i, theta);
  const double ratio = inverse_mills_ratio(t);
  const double curvature = -ratio * (t + ratio);
  Matrix h(theta.size(), theta.size());
  for (Index a = 0; a < theta.size(); ++a)
    for (Index b = 0; b < theta.size(); ++b) h(a, b) = curvature * design(data, i, a) * design(data, i, b);
  return h;
}

Evaluation ProbitRegressionModel::evaluate(const SurveyDataset& data, const Vector& weights, const Vector& theta,
                                           Derivatives order) const {
  const Index k = theta.size();
  const Vector& y = data.response();
  Evaluation out;
  if (order != Derivatives::Value) out.gradient = Vector::Zero(k);
  if (order == Derivatives::Hessian) out.hessian = Matrix::Zero(k, k);
  Vector row(k);
  for (Index i = 0; i < data.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    for (Index c = 0; c < k; ++c) row[c] = design(data, i, c);
    const double sign = y[i] == 1.0 ? 1.0 : -1.0;
    const double t = sign * row.dot(theta);
    out.value += w * normal_log_cdf(t);
    if (order == Derivatives::Value) continue;
    const double ratio = inverse_mills_ratio(t);
    out.gradient += (w * sign * ratio) * row;
    if (order == Derivatives::Hessian) {
      const double curvature = -w * ratio * (t + ratio);
      for (Index a = 0; a < k; ++a)
        for (Index b = 0; b <= a; ++b) out.hessian(a, b) += curvature * row[a] * row[b];
    }
  }
  if (order == Derivatives::Hessian)
    out.hessian.triangularView<Eigen::StrictlyUpper>() = out.hessian.transpose().triangularView<Eigen::StrictlyUpper>();
  return out;
}

Matrix ProbitRegressionModel::score_matrix(const SurveyDataset& data, const Vector& theta) const {
  Matrix out(data.size(), theta.size());
  for (Index i = 0; i < data.size(); ++i) out.row(i) = score(data, i, theta).transpose();
  return out;
}

Vector ProbitRegressionModel::start_value(const SurveyDataset& data, const Vector&) const {
  return Vector::Zero(param_dim(data));
}

Vector ProbitRegressionModel::fit(const SurveyDataset& data, const Vector& weights) const {
  const Vector& y = data.response();
  double positive = 0.0, negative = 0.0;
  for (Index i = 0; i < y.size(); ++i) (y[i] == 1.0 ? positive : negative) += weights[i];
  if (!(positive > 0.0) || !(negative > 0.0))
    throw Error(ErrorCode::Separation, "only one response class carries positive weight");
  NewtonOptions options;
  options.separation_bound = kSeparationBound;
  Vector beta = newton_mle(*this, data, weights, start_value(data, weights), options);

  // A finite optimum always leaves some weighted observation on the wrong side
  // of the linear predictor; if none is, scaling beta up keeps increasing the
  // likelihood and the data are (quasi-)separated.
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < y.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const double t = (y[i] == 1.0 ? 1.0 : -1.0) * linear_predictor(data, i, beta);
    lowest = std::min(lowest, t);
    highest = std::max(highest, t);
  }
  if (lowest >= 0.0 && highest > 0.0)
    throw Error(ErrorCode::Separation, "response is separated by the covariates; no finite maximizer");
  return beta;
}

}  // namespace swlb
