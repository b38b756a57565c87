#include "riskrel/error.hpp"

namespace riskrel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyParagraph: return "EmptyParagraph";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::NonFiniteSimilarity: return "NonFiniteSimilarity";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::EmptyFirm: return "EmptyFirm";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownParagraphId: return "UnknownParagraphId";
    case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::UnsortedDates: return "UnsortedDates";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::UnknownFirm: return "UnknownFirm";
    case ErrorCode::EmptyRelevanceSet: return "EmptyRelevanceSet";
  }
  return "Unknown";
}

}  // namespace riskrel
