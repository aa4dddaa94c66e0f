#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace refmargin {

enum class ErrorCode {
  MissingColumn,
  NonBinaryLabels,
  ParseError,
  TooFewSamples,
  InvalidTheta,
  InvalidParams,
  InvalidConfig,
  EmptyData,
  DimensionMismatch,
  StageOutOfRange,
  EmptyEnsemble,
  EmptyProfile,
  InvalidQuantile,
  InvalidExponent,
  NonpositiveTheta,
  BadBins,
  ParamsOutOfRegime,
  DeltaOutOfRange,
  EmptyInput,
  FeatureMismatch,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace refmargin
