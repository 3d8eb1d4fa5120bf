#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "swlb/error.hpp"
#include "swlb/estimators.hpp"
#include "test_support.hpp"

using namespace swlb;
using namespace swlb::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SurveyDataset gaussian_data(const Vector& x, const Vector& w) { return SurveyDataset(Matrix(x.size(), 0), x, w); }

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

PmleFit gaussian_fit(const Vector& theta, const Matrix& cov) {
  PmleFit fit;
  fit.theta_hat = theta;
  fit.sandwich_cov = cov;
  fit.n = 10;
  return fit;
}

}  // namespace

TEST_CASE("sandwich covariance for two equally weighted points", "[estimators]") {
  const GaussianMeanModel model;
  const auto data = gaussian_data(vec({0, 2}), vec({1, 1}));
  const PmleFit fit = fit_pmle(model, data, scale_weights(data.raw_weights()));
  CHECK_THAT(fit.theta_hat[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(fit.theta_hat[1], WithinAbs(1.0, 1e-14));
  CHECK_THAT(fit.j_matrix(0, 0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(fit.j_matrix(1, 1), WithinAbs(0.5, 1e-12));
  CHECK_THAT(fit.j_matrix(0, 1), WithinAbs(0.0, 1e-12));
  CHECK_THAT(fit.sandwich_cov(0, 0), WithinAbs(0.5, 1e-12));
  CHECK(fit.n == 2);
}

TEST_CASE("Wald interval examples", "[estimators]") {
  const auto wide = wald_interval(gaussian_fit(vec({0}), Matrix::Identity(1, 1)), 0.95);
  CHECK_THAT(wide.lower[0], WithinAbs(-1.959963984540054, 1e-6));
  CHECK_THAT(wide.upper[0], WithinAbs(1.959963984540054, 1e-6));
  CHECK(wide.method == IntervalMethod::Wald);

  const auto half = wald_interval(gaussian_fit(vec({0}), Matrix::Identity(1, 1)), 0.5);
  CHECK_THAT(half.lower[0], WithinAbs(-0.6744897501960817, 1e-6));
  CHECK_THAT(half.upper[0], WithinAbs(0.6744897501960817, 1e-6));

  const auto point = wald_interval(gaussian_fit(vec({3}), Matrix::Zero(1, 1)), 0.95);
  CHECK(point.lower[0] == 3.0);
  CHECK(point.upper[0] == 3.0);

  CHECK_THROWS_AS(wald_interval(gaussian_fit(vec({0}), Matrix::Identity(1, 1)), 1.0), Error);
  CHECK_THROWS_AS(wald_interval(gaussian_fit(vec({0}), Matrix::Identity(1, 1)), 0.0), Error);
}

TEST_CASE("Wald intervals are symmetric and nested in the level", "[estimators][property]") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    const double theta = 5.0 * normal(gen);
    const double var = std::exp(normal(gen));
    double a = uniform(gen), b = uniform(gen);
    if (a > b) std::swap(a, b);
    const auto fit = gaussian_fit(vec({theta}), Matrix::Constant(1, 1, var));
    const auto narrow = wald_interval(fit, a);
    const auto wide = wald_interval(fit, b);
    CHECK_THAT(narrow.upper[0] - theta, WithinRel(theta - narrow.lower[0], 1e-12));
    CHECK(wide.lower[0] <= narrow.lower[0]);
    CHECK(narrow.upper[0] <= wide.upper[0]);
  }
}

TEST_CASE("sandwich is symmetric and positive semidefinite", "[estimators][property]") {
  std::mt19937_64 gen(12);
  const ProbitRegressionModel probit;
  for (int trial = 0; trial < 20; ++trial) {
    const auto sample = random_probit_sample(gen, 400, 2, vec({0.2, 0.7, -0.4}));
    const PmleFit fit = fit_pmle(probit, sample.data, scale_weights(sample.data.raw_weights()));
    CHECK((fit.sandwich_cov - fit.sandwich_cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(fit.sandwich_cov);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-14 * eig.eigenvalues().maxCoeff());
  }
}

TEST_CASE("PMLE is invariant to rescaling raw weights", "[estimators][property]") {
  std::mt19937_64 gen(13);
  const ProbitRegressionModel probit;
  for (int trial = 0; trial < 10; ++trial) {
    const auto sample = random_probit_sample(gen, 300, 2, vec({-0.3, 0.5, 0.5}));
    const Vector& w = sample.data.raw_weights();
    const SurveyDataset scaled_copy(sample.data.covariates(), sample.data.response(), (123.0 * w).eval());
    const PmleFit a = fit_pmle(probit, sample.data, scale_weights(w));
    const PmleFit b = fit_pmle(probit, scaled_copy, scale_weights(scaled_copy.raw_weights()));
    CHECK((a.theta_hat - b.theta_hat).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(relative_error(a.sandwich_cov, b.sandwich_cov) < 1e-9);
  }
}

TEST_CASE("J matches a finite-difference Hessian of the mean weighted log-likelihood", "[estimators]") {
  std::mt19937_64 gen(14);
  const ProbitRegressionModel probit;
  for (int trial = 0; trial < 10; ++trial) {
    const auto sample = random_probit_sample(gen, 250, 2, vec({0.4, -0.6, 0.3}));
    const ScaledWeights scaled = scale_weights(sample.data.raw_weights());
    const PmleFit fit = fit_pmle(probit, sample.data, scaled);
    const double n = static_cast<double>(sample.data.size());
    auto grad = [&](const Vector& b) {
      return fd_gradient([&](const Vector& t) { return weighted_log_likelihood(probit, sample.data, scaled.values(), t) / n; },
                         b, 1e-6);
    };
    const Matrix numeric = -fd_jacobian(grad, fit.theta_hat, 1e-4);
    CHECK(relative_error(fit.j_matrix, numeric) < 1e-4);

    // I from its definition, built from per-observation scores.
    Matrix i_matrix = Matrix::Zero(3, 3);
    for (Index i = 0; i < sample.data.size(); ++i) {
      const Vector s = probit.score(sample.data, i, fit.theta_hat);
      i_matrix += scaled[i] * scaled[i] * s * s.transpose();
    }
    i_matrix /= n;
    CHECK(relative_error(fit.i_matrix, i_matrix) < 1e-12);
  }
}

TEST_CASE("unweighted fit equals PMLE under equal weights", "[estimators]") {
  std::mt19937_64 gen(15);
  const ProbitRegressionModel probit;
  const auto sample = random_probit_sample(gen, 300, 1, vec({0.1, 1.0}));
  const PmleFit unweighted = fit_unweighted(probit, sample.data);
  const PmleFit equal = fit_pmle(probit, sample.data, ScaledWeights::unit(sample.data.size()));
  CHECK((unweighted.theta_hat - equal.theta_hat).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(relative_error(unweighted.sandwich_cov, equal.sandwich_cov) < 1e-12);
}

TEST_CASE("Gaussian sandwich mean variance equals weighted variance over n", "[estimators][property]") {
  std::mt19937_64 gen(16);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.5, 10.0);
  const GaussianMeanModel model;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 10 + static_cast<Index>(gen() % 500);
    Vector x(n), w(n);
    for (Index i = 0; i < n; ++i) {
      x[i] = 10 + 4 * normal(gen);
      w[i] = uniform(gen);
    }
    const auto data = gaussian_data(x, w);
    const ScaledWeights scaled = scale_weights(w);
    const PmleFit fit = fit_pmle(model, data, scaled);
    const Vector& ws = scaled.values();
    const double mu = ws.dot(x) / ws.sum();
    const double expected = (ws.array().square() * (x.array() - mu).square()).sum() / (ws.sum() * ws.sum());
    CHECK_THAT(fit.sandwich_cov(0, 0), WithinRel(expected, 1e-10));
  }
}

TEST_CASE("sandwich reduces to the Hessian inverse under a correct model", "[estimators]") {
  std::mt19937_64 gen(17);
  const ProbitRegressionModel probit;
  const Vector truth = vec({0.2, 0.5});
  auto sample = random_probit_sample(gen, 10000, 1, truth);
  const SurveyDataset data(sample.data.covariates(), sample.data.response(), Vector::Ones(10000));
  const PmleFit fit = fit_pmle(probit, data, ScaledWeights::unit(10000));
  const Matrix naive = invert_information(fit.j_matrix) / 10000.0;
  for (Index k = 0; k < 2; ++k) CHECK_THAT(fit.sandwich_cov(k, k), WithinRel(naive(k, k), 0.02));
}

TEST_CASE("information inversion rejects singular and non-positive matrices", "[estimators]") {
  Matrix singular(2, 2);
  singular << 1, 1, 1, 1;
  auto code = [](const Matrix& m) {
    try {
      invert_information(m);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code(singular) == ErrorCode::SingularInformation);
  CHECK(code(-Matrix::Identity(2, 2)) == ErrorCode::SingularInformation);
  Matrix ill = Matrix::Identity(2, 2);
  ill(1, 1) = 1e-13;
  CHECK(code(ill) == ErrorCode::SingularInformation);
  Matrix fine = Matrix::Identity(2, 2);
  fine(1, 1) = 4;
  CHECK_THAT(invert_information(fine)(1, 1), WithinAbs(0.25, 1e-15));
}

TEST_CASE("PMLE signals a degenerate variance", "[estimators]") {
  const GaussianMeanModel model;
  const auto data = gaussian_data(vec({1, 1, 1}), vec({1, 2, 3}));
  CHECK_THROWS_AS(fit_pmle(model, data, scale_weights(data.raw_weights())), Error);
}
