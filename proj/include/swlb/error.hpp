#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace swlb {

enum class ErrorCode {
  // input / configuration
  InvalidArgument,
  NonPositiveWeight,
  TooFewObservations,
  MissingColumn,
  ParseError,
  ConfigError,
  DomainError,
  // numerical
  DegenerateDraw,
  Separation,
  NonConvergence,
  DegenerateVariance,
  SingularInformation,
  TooManyFailures,
  TooFewDraws,
};

std::string_view to_string(ErrorCode code);

// Numerical failures map to CLI exit code 3, everything else to 2.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::string> column = std::nullopt)
      : std::runtime_error(message), code_(code), row_(row), column_(std::move(column)) {}

  ErrorCode code() const noexcept { return code_; }
  // 1-based data row (header excluded) for ingestion errors.
  const std::optional<std::size_t>& row() const noexcept { return row_; }
  const std::optional<std::string>& column() const noexcept { return column_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::optional<std::string> column_;
};

}  // namespace swlb
