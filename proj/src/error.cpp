#include "democlust/error.hpp"

namespace democlust {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kUnknownFeature: return "unknown_feature";
    case ErrorCode::kEmptyFeatures: return "empty_features";
    case ErrorCode::kEmptyCell: return "empty_cell";
    case ErrorCode::kEmptySelection: return "empty_selection";
    case ErrorCode::kInfeasibleK: return "infeasible_k";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNumericFailure: return "numeric_failure";
    case ErrorCode::kTooSmall: return "too_small";
    case ErrorCode::kUndefinedMetric: return "undefined_metric";
    case ErrorCode::kNoLabels: return "no_labels";
    case ErrorCode::kUnknownCluster: return "unknown_cluster";
    case ErrorCode::kUnknownItem: return "unknown_item";
    case ErrorCode::kEmptySpace: return "empty_space";
    case ErrorCode::kEmptyLayout: return "empty_layout";
    case ErrorCode::kCancelled: return "cancelled";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& what)
    : Error(ErrorCode::kParse,
            "CSV parse error at row " + std::to_string(row) + ", column " +
                std::to_string(column) + ": " + what),
      row_(row),
      column_(column) {}

NumericFailure::NumericFailure(const std::string& what, double residual)
    : Error(ErrorCode::kNumericFailure,
            what + " (residual norm " + std::to_string(residual) + ")"),
      residual_(residual) {}

}  // namespace democlust
