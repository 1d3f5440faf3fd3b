#ifndef SLGF_ERROR_HPP
#define SLGF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace slgf {

enum class ErrorCode {
  NamedColumnAbsent,
  ReservedNameCollision,
  ParseFailure,
  KindMismatch,
  FormulaParseFailure,
  DegenerateDesign,
  DegenerateFit,
  InsufficientData,
  InvalidMinLevels,
  ConfigError,
  BadStart,
  BracketFailure,
  StencilFailure,
  DomainError,
  TrainingFractionExhausted,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; code() lets callers
// (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace slgf

#endif  // SLGF_ERROR_HPP
