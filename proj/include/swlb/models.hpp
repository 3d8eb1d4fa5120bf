#pragma once

#include <string>
#include <vector>

#include "swlb/survey_data.hpp"
#include "swlb/types.hpp"

namespace swlb {

enum class Derivatives { Value, Gradient, Hessian };

// Weighted sums sum_i w_i log f, sum_i w_i psi_i, sum_i w_i psi'_i at one theta.
// gradient/hessian are left empty when not requested.
struct Evaluation {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

// A parametric density f_theta evaluated per observation of a SurveyDataset.
// Implementations are stateless and safe to share across threads.
class LikelihoodModel {
 public:
  virtual ~LikelihoodModel() = default;

  virtual std::string name() const = 0;
  virtual Index param_dim(const SurveyDataset& data) const = 0;
  virtual std::vector<std::string> param_names(const SurveyDataset& data) const = 0;

  // Throws InvalidArgument if the dataset does not fit the model.
  virtual void check_data(const SurveyDataset& data) const = 0;
  virtual bool in_domain(const Vector& theta) const { return theta.allFinite(); }

  virtual double log_density(const SurveyDataset& data, Index i, const Vector& theta) const = 0;
  // psi_i(theta): gradient of log f_theta(X_i).
  virtual Vector score(const SurveyDataset& data, Index i, const Vector& theta) const = 0;
  // psi'_i(theta): Hessian of log f_theta(X_i).
  virtual Matrix hessian(const SurveyDataset& data, Index i, const Vector& theta) const = 0;

  // Fused weighted evaluation. The default loops over the per-observation
  // functions; concrete models override it with a single pass.
  virtual Evaluation evaluate(const SurveyDataset& data, const Vector& weights, const Vector& theta,
                              Derivatives order) const;

  // n x K matrix whose row i is psi_i(theta).
  virtual Matrix score_matrix(const SurveyDataset& data, const Vector& theta) const;

  // argmax_theta sum_i w_i log f_theta(X_i).
  virtual Vector fit(const SurveyDataset& data, const Vector& weights) const = 0;

  // Starting point for the generic Newton solver.
  virtual Vector start_value(const SurveyDataset& data, const Vector& weights) const = 0;
};

// Observations are the response column; theta = (mu, sigma^2).
class GaussianMeanModel final : public LikelihoodModel {
 public:
  std::string name() const override { return "gaussian-mean"; }
  Index param_dim(const SurveyDataset&) const override { return 2; }
  std::vector<std::string> param_names(const SurveyDataset&) const override { return {"mu", "sigma2"}; }
  void check_data(const SurveyDataset& data) const override;
  bool in_domain(const Vector& theta) const override;

  double log_density(const SurveyDataset& data, Index i, const Vector& theta) const override;
  Vector score(const SurveyDataset& data, Index i, const Vector& theta) const override;
  Matrix hessian(const SurveyDataset& data, Index i, const Vector& theta) const override;
  Evaluation evaluate(const SurveyDataset& data, const Vector& weights, const Vector& theta,
                      Derivatives order) const override;
  Matrix score_matrix(const SurveyDataset& data, const Vector& theta) const override;

  // Closed form: weighted mean and weighted (1/sum w) variance. Throws
  // DegenerateVariance when sigma^2 falls to 1e-12 times the sample variance.
  Vector fit(const SurveyDataset& data, const Vector& weights) const override;
  // Unweighted mean and variance.
  Vector start_value(const SurveyDataset& data, const Vector& weights) const override;
};

// P(y = 1 | x) = Phi(x' beta), y in {0, 1}. With an intercept the design row
// is (1, x_i), otherwise x_i.
class ProbitRegressionModel final : public LikelihoodModel {
 public:
  explicit ProbitRegressionModel(bool intercept = true) : intercept_(intercept) {}

  bool intercept() const noexcept { return intercept_; }

  std::string name() const override { return "probit"; }
  Index param_dim(const SurveyDataset& data) const override;
  std::vector<std::string> param_names(const SurveyDataset& data) const override;
  void check_data(const SurveyDataset& data) const override;

  double log_density(const SurveyDataset& data, Index i, const Vector& theta) const override;
  Vector score(const SurveyDataset& data, Index i, const Vector& theta) const override;
  Matrix hessian(const SurveyDataset& data, Index i, const Vector& theta) const override;
  Evaluation evaluate(const SurveyDataset& data, const Vector& weights, const Vector& theta,
                      Derivatives order) const override;
  Matrix score_matrix(const SurveyDataset& data, const Vector& theta) const override;

  // Newton-Raphson from beta = 0 with the separation guard.
  Vector fit(const SurveyDataset& data, const Vector& weights) const override;
  Vector start_value(const SurveyDataset& data, const Vector& weights) const override;

 private:
  double linear_predictor(const SurveyDataset& data, Index i, const Vector& beta) const;
  double design(const SurveyDataset& data, Index i, Index k) const;

  bool intercept_;
};

struct NewtonOptions {
  int max_iterations = 100;
  int max_halvings = 60;
  // Separation is raised once |theta|_inf exceeds this bound; <= 0 disables.
  double separation_bound = 0.0;
};

// Maximum-norm tolerance on the weighted score of a returned optimum:
// 1e-8 * max(1, n), tightened in proportion when the weights sum to less than n.
double score_tolerance(Index n, double weight_sum);

// Newton-Raphson with step halving on sum_i w_i log f_theta(X_i).
// Throws NonConvergence after max_iterations and Separation past the bound.
Vector newton_mle(const LikelihoodModel& model, const SurveyDataset& data, const Vector& weights,
                  Vector start, const NewtonOptions& options = {});

// sum_i w_i log f_theta(X_i); DomainError outside the parameter space.
double weighted_log_likelihood(const LikelihoodModel& model, const SurveyDataset& data,
                               const Vector& weights, const Vector& theta);

Vector weighted_mle(const LikelihoodModel& model, const SurveyDataset& data, const Vector& weights);

}  // namespace swlb
