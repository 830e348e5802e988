#include "xfode/error.hpp"

namespace xfode {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NumericalDivergence: return "NumericalDivergence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DivergedRun: return "DivergedRun";
    case ErrorCode::AllSeedsDiverged: return "AllSeedsDiverged";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidModelFile: return "InvalidModelFile";
  }
  return "Unknown";
}

}  // namespace xfode
