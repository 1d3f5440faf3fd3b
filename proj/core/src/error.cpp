#include "slgf/error.hpp"

namespace slgf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NamedColumnAbsent: return "NamedColumnAbsent";
    case ErrorCode::ReservedNameCollision: return "ReservedNameCollision";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::FormulaParseFailure: return "FormulaParseFailure";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidMinLevels: return "InvalidMinLevels";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::BadStart: return "BadStart";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::StencilFailure: return "StencilFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::TrainingFractionExhausted: return "TrainingFractionExhausted";
  }
  return "Unknown";
}

}  // namespace slgf
