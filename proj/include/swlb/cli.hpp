#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swlb/error.hpp"
#include "swlb/estimators.hpp"

namespace swlb::cli {

enum class ModelKind { GaussianMean, Probit };
enum class FitMethod { Pmle, Swlb, Unweighted, WlbNaive, Wlb };

struct FitRequest {
  std::string input;
  std::string weight_col;
  std::optional<std::string> response_col;
  std::vector<std::string> covariates;
  ModelKind model = ModelKind::GaussianMean;
  bool intercept = true;
  FitMethod method = FitMethod::Pmle;
  int b = 2000;
  std::uint64_t seed = 0;
  double level = 0.95;
  bool with_pmle = false;
  int threads = 0;
};

struct ParameterEstimate {
  std::string name;
  double estimate = 0.0;
  double spread = 0.0;  // standard error (Wald) or bootstrap sd (percentile)
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> pmle;
};

struct FitReport {
  std::string model;
  std::string method;
  std::vector<ParameterEstimate> parameters;
  double level = 0.95;
  IntervalMethod interval_method = IntervalMethod::Wald;
  Index n = 0;
  std::optional<int> b_requested;
  std::optional<Index> b_effective;
  int failures = 0;
  std::map<ErrorCode, int> failure_reasons;
  std::optional<std::uint64_t> seed;
  double runtime_seconds = 0.0;  // not serialized: reports must be reproducible
};

// Throws swlb::Error; the CLI maps it to an exit code.
void validate(const FitRequest& request);
FitReport run_fit(const FitRequest& request);

std::string to_string(ModelKind kind);
std::string to_string(FitMethod method);

// Full command-line entry point. Returns the process exit code:
// 0 success, 2 input or configuration error, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swlb::cli
