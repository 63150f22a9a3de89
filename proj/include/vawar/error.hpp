#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vawar {

enum class ErrorCode {
  NonPositiveField,
  NonFinite,
  ValueMismatch,
  NonUniformSpacing,
  EmptyTape,
  MalformedRow,
  InsufficientHistory,
  WindowOutOfRange,
  EmptySeries,
  OrderZero,
  MismatchedWindows,
  NotIntegrable,
  QuadratureDivergence,
  NonPositiveVariance,
  InvalidArgument,
  InvalidConfig,
  UnknownStatistic,
};

inline constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveField: return "NonPositiveField";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ValueMismatch: return "ValueMismatch";
    case ErrorCode::NonUniformSpacing: return "NonUniformSpacing";
    case ErrorCode::EmptyTape: return "EmptyTape";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::OrderZero: return "OrderZero";
    case ErrorCode::MismatchedWindows: return "MismatchedWindows";
    case ErrorCode::NotIntegrable: return "NotIntegrable";
    case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownStatistic: return "UnknownStatistic";
  }
  return "Unknown";
}

/// Every failure raised by the library. `row()` is the 1-based line number
/// in the CSV source for ingestion errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt)
      : std::runtime_error(format(code, message, row)),
        code_(code),
        row_(row),
        message_(message) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// The message without the code/row prefix.
  [[nodiscard]] const std::string& message() const noexcept { return message_; }
  [[nodiscard]] std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            std::optional<std::size_t> row) {
    std::string out(to_string(code));
    if (row) out += " at row " + std::to_string(*row);
    out += ": ";
    out += message;
    return out;
  }

  ErrorCode code_;
  std::optional<std::size_t> row_;
  std::string message_;
};

}  // namespace vawar
