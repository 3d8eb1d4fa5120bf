#include "swlb/survey_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "swlb/error.hpp"

namespace swlb {

namespace {

void check_weights(std::span<const double> weights) {
  if (weights.size() < 2)
    throw Error(ErrorCode::TooFewObservations,
                "at least 2 observations are required, got " + std::to_string(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] <= 0.0)
      throw Error(ErrorCode::NonPositiveWeight,
                  "weight " + std::to_string(i + 1) + " is not a finite positive number", i + 1);
  }
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(trim(field));
  return fields;
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

}  // namespace

SurveyDataset::SurveyDataset(Matrix covariates, std::optional<Vector> response, Vector raw_weights,
                             std::vector<std::string> covariate_names)
    : covariates_(std::move(covariates)),
      response_(std::move(response)),
      raw_weights_(std::move(raw_weights)),
      covariate_names_(std::move(covariate_names)) {
  check_weights({raw_weights_.data(), static_cast<std::size_t>(raw_weights_.size())});
  const Index n = raw_weights_.size();
  if (covariates_.rows() != n && !(covariates_.cols() == 0))
    throw Error(ErrorCode::InvalidArgument, "covariate rows do not match the number of weights");
  if (covariates_.cols() == 0) covariates_.resize(n, 0);
  if (response_ && response_->size() != n)
    throw Error(ErrorCode::InvalidArgument, "response length does not match the number of weights");
  if (covariate_names_.empty()) {
    for (Index k = 0; k < covariates_.cols(); ++k) covariate_names_.push_back("x" + std::to_string(k + 1));
  } else if (static_cast<Index>(covariate_names_.size()) != covariates_.cols()) {
    throw Error(ErrorCode::InvalidArgument, "covariate name count does not match covariate columns");
  }
}

const Vector& SurveyDataset::response() const {
  if (!response_) throw Error(ErrorCode::InvalidArgument, "dataset has no response column");
  return *response_;
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      compensation += (sum - t) + v;
    else
      compensation += (v - t) + sum;
    sum = t;
  }
  return sum + compensation;
}

ScaledWeights ScaledWeights::unit(Index n) {
  if (n < 2)
    throw Error(ErrorCode::TooFewObservations, "at least 2 observations are required");
  return ScaledWeights(Vector::Ones(n));
}

ScaledWeights scale_weights(std::span<const double> raw_weights) {
  check_weights(raw_weights);
  const double n = static_cast<double>(raw_weights.size());
  const double total = compensated_sum(raw_weights);
  Vector scaled(static_cast<Index>(raw_weights.size()));
  for (std::size_t i = 0; i < raw_weights.size(); ++i) scaled[static_cast<Index>(i)] = n * (raw_weights[i] / total);
  return ScaledWeights(std::move(scaled));
}

ScaledWeights scale_weights(const Vector& raw_weights) {
  return scale_weights(std::span<const double>(raw_weights.data(), static_cast<std::size_t>(raw_weights.size())));
}

SurveyDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open input file '" + path.string() + "'");
  return read_csv(in, schema);
}

SurveyDataset read_csv(std::istream& in, const ColumnSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "input has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_record(line);

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t c = 0; c < header.size(); ++c) position.emplace(header[c], c);
  auto locate = [&](const std::string& name) {
    const auto it = position.find(name);
    if (it == position.end())
      throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found in header", std::nullopt, name);
    return it->second;
  };

  const std::size_t weight_col = locate(schema.weight);
  const std::optional<std::size_t> response_col =
      schema.response ? std::optional<std::size_t>(locate(*schema.response)) : std::nullopt;
  std::vector<std::size_t> covariate_cols;
  for (const auto& name : schema.covariates) covariate_cols.push_back(locate(name));

  std::vector<double> weights, response;
  std::vector<std::vector<double>> covariates(covariate_cols.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_record(line);
    auto cell = [&](std::size_t col, const std::string& name) {
      if (col >= fields.size())
        throw Error(ErrorCode::ParseError,
                    "row " + std::to_string(row) + ": missing value for column '" + name + "'", row, name);
      const auto value = parse_number(fields[col]);
      if (!value)
        throw Error(ErrorCode::ParseError,
                    "row " + std::to_string(row) + ", column '" + name + "': '" + fields[col] +
                        "' is not a finite number",
                    row, name);
      return *value;
    };
    const double w = cell(weight_col, schema.weight);
    if (w <= 0.0)
      throw Error(ErrorCode::NonPositiveWeight,
                  "row " + std::to_string(row) + ": weight must be positive", row, schema.weight);
    weights.push_back(w);
    if (response_col) response.push_back(cell(*response_col, *schema.response));
    for (std::size_t k = 0; k < covariate_cols.size(); ++k)
      covariates[k].push_back(cell(covariate_cols[k], schema.covariates[k]));
  }

  const Index n = static_cast<Index>(weights.size());
  Matrix x(n, static_cast<Index>(covariate_cols.size()));
  for (std::size_t k = 0; k < covariate_cols.size(); ++k)
    x.col(static_cast<Index>(k)) = Eigen::Map<const Vector>(covariates[k].data(), n);
  std::optional<Vector> y;
  if (response_col) y = Eigen::Map<const Vector>(response.data(), n);
  return SurveyDataset(std::move(x), std::move(y), Eigen::Map<const Vector>(weights.data(), n),
                       schema.covariates);
}

void write_csv(std::ostream& out, const SurveyDataset& data, const ColumnSchema& schema) {
  std::vector<std::string> names = schema.covariates;
  if (schema.response) names.push_back(*schema.response);
  names.push_back(schema.weight);
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  for (Index i = 0; i < data.size(); ++i) {
    for (Index k = 0; k < data.num_covariates(); ++k) out << format_number(data.covariates()(i, k)) << ',';
    if (schema.response) out << format_number(data.response()[i]) << ',';
    out << format_number(data.raw_weights()[i]) << '\n';
  }
}

}  // namespace swlb
