#pragma once

// Standard normal density, distribution and quantile functions.

namespace swlb {

double normal_pdf(double x);
double normal_log_pdf(double x);
double normal_cdf(double x);

// log Phi(x), accurate far into the lower tail (asymptotic series below -20)
// and near 0 in the upper tail.
double normal_log_cdf(double x);

// phi(x) / Phi(x). Finite for every finite x; behaves like -x as x -> -inf.
double inverse_mills_ratio(double x);

// Phi^{-1}(p) for p in (0, 1). Rational approximation followed by one Halley
// refinement step; absolute error well below 1e-9 over the open interval.
double normal_quantile(double p);

}  // namespace swlb
