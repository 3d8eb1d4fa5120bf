#pragma once

// Test-only oracles and generators shared by the unit suites.

#include <cmath>
#include <functional>
#include <random>

#include "swlb/survey_data.hpp"
#include "swlb/types.hpp"

namespace swlb::testing {

// Central finite-difference gradient.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Vector up = x, down = x;
    const double step = h * std::max(1.0, std::abs(x[k]));
    up[k] += step;
    down[k] -= step;
    g[k] = (f(up) - f(down)) / (2.0 * step);
  }
  return g;
}

// Central finite-difference Jacobian of a vector function.
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  const Index m = f(x).size();
  Matrix jac(m, x.size());
  for (Index k = 0; k < x.size(); ++k) {
    Vector up = x, down = x;
    const double step = h * std::max(1.0, std::abs(x[k]));
    up[k] += step;
    down[k] -= step;
    jac.col(k) = (f(up) - f(down)) / (2.0 * step);
  }
  return jac;
}

inline double relative_error(const Matrix& got, const Matrix& want) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

// Unweighted probit log-likelihood written directly from erfc; independent of
// the library's log-cdf routine.
inline double probit_loglik_oracle(const Matrix& design, const Vector& y, const Vector& beta) {
  double total = 0.0;
  for (Index i = 0; i < design.rows(); ++i) {
    const double eta = design.row(i).dot(beta);
    const double p = 0.5 * std::erfc(-eta / std::sqrt(2.0));
    total += y[i] == 1.0 ? std::log(p) : std::log(1.0 - p);
  }
  return total;
}

// Newton from zero using finite-difference derivatives of the oracle likelihood.
inline Vector probit_mle_oracle(const Matrix& design, const Vector& y) {
  auto f = [&](const Vector& b) { return probit_loglik_oracle(design, y, b); };
  Vector beta = Vector::Zero(design.cols());
  for (int it = 0; it < 200; ++it) {
    const Vector g = fd_gradient(f, beta, 1e-6);
    const Matrix h = fd_jacobian([&](const Vector& b) { return fd_gradient(f, b, 1e-6); }, beta, 1e-4);
    Vector step = h.ldlt().solve(-g);
    double t = 1.0;
    while (f(beta + t * step) < f(beta) - 1e-12 && t > 1e-10) t *= 0.5;
    beta += t * step;
    if (step.cwiseAbs().maxCoeff() * t < 1e-12) break;
  }
  return beta;
}

struct ProbitSample {
  SurveyDataset data;
  Matrix design;  // with intercept column
};

inline ProbitSample random_probit_sample(std::mt19937_64& gen, Index n, Index p, const Vector& beta) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.2, 5.0);
  Matrix x(n, p);
  Vector y(n), w(n);
  Matrix design(n, p + 1);
  for (Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (Index k = 0; k < p; ++k) design(i, k + 1) = x(i, k) = normal(gen);
    const double eta = design.row(i).dot(beta);
    y[i] = normal(gen) < eta ? 1.0 : 0.0;
    w[i] = uniform(gen);
  }
  return {SurveyDataset(x, y, w), design};
}

}  // namespace swlb::testing
