#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swlb/types.hpp"

namespace swlb {

// Observed sample: n rows of covariates, an optional response and the raw
// sampling weights. Immutable after construction.
class SurveyDataset {
 public:
  SurveyDataset(Matrix covariates, std::optional<Vector> response, Vector raw_weights,
                std::vector<std::string> covariate_names = {});

  Index size() const noexcept { return raw_weights_.size(); }
  Index num_covariates() const noexcept { return covariates_.cols(); }

  const Matrix& covariates() const noexcept { return covariates_; }
  bool has_response() const noexcept { return response_.has_value(); }
  // Throws InvalidArgument when the dataset has no response.
  const Vector& response() const;
  const Vector& raw_weights() const noexcept { return raw_weights_; }
  const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }

 private:
  Matrix covariates_;
  std::optional<Vector> response_;
  Vector raw_weights_;
  std::vector<std::string> covariate_names_;
};

// w~_i = n w_i / sum_j w_j, so that sum w~ = n.
class ScaledWeights {
 public:
  const Vector& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }

  // All ones: the scaling of any equal-weight sample.
  static ScaledWeights unit(Index n);

 private:
  friend ScaledWeights scale_weights(std::span<const double> raw_weights);
  explicit ScaledWeights(Vector values) : values_(std::move(values)) {}
  Vector values_;
};

ScaledWeights scale_weights(std::span<const double> raw_weights);
ScaledWeights scale_weights(const Vector& raw_weights);

// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

struct ColumnSchema {
  std::string weight;
  std::optional<std::string> response;
  std::vector<std::string> covariates;
};

SurveyDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema);
SurveyDataset read_csv(std::istream& in, const ColumnSchema& schema);

// Writes the schema's columns (covariates, response, weight) with
// round-trip exact number formatting.
void write_csv(std::ostream& out, const SurveyDataset& data, const ColumnSchema& schema);

}  // namespace swlb
