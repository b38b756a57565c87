#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskrel {

enum class ErrorCode {
  InvalidArgument,
  InvalidConfig,
  MissingFile,
  IoError,
  ParseError,
  EmptyCorpus,
  EmptyParagraph,
  ZeroVector,
  InsufficientPairs,
  NonFiniteSimilarity,
  NonFiniteGradient,
  EmptyFirm,
  DimensionMismatch,
  UnknownParagraphId,
  FingerprintMismatch,
  NonPositivePrice,
  TooShort,
  UnsortedDates,
  InsufficientOverlap,
  ZeroVariance,
  DegenerateInput,
  UnknownFirm,
  EmptyRelevanceSet,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can report it as a single machine-parsable line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace riskrel
