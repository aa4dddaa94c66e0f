#include "refmargin/error.hpp"

namespace refmargin {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonBinaryLabels: return "NonBinaryLabels";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InvalidTheta: return "InvalidTheta";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::StageOutOfRange: return "StageOutOfRange";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::InvalidQuantile: return "InvalidQuantile";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::NonpositiveTheta: return "NonpositiveTheta";
    case ErrorCode::BadBins: return "BadBins";
    case ErrorCode::ParamsOutOfRegime: return "ParamsOutOfRegime";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::FeatureMismatch: return "FeatureMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace refmargin
