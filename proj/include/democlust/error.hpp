#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace democlust {

enum class ErrorCode {
    kParse,
    kEmptyInput,
    kUnknownFeature,
    kEmptyFeatures,
    kEmptyCell,
    kEmptySelection,
    kInfeasibleK,
    kInvalidArgument,
    kNumericFailure,
    kTooSmall,
    kUndefinedMetric,
    kNoLabels,
    kUnknownCluster,
    kUnknownItem,
    kEmptySpace,
    kEmptyLayout,
    kCancelled,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the engine.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Malformed CSV. Row and column are 1-based positions in the document
/// (the header is row 1).
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& what);

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// An iterative numeric routine hit its iteration cap.
class NumericFailure : public Error {
public:
    NumericFailure(const std::string& what, double residual);

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace democlust
