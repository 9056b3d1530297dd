#pragma once

#include <stdexcept>
#include <string>

namespace ggc {

enum class ErrorCode {
  InvalidArgument,
  NotInvertible,
  PrecisionUnderflow,
  CannotPrepare,
  Ambiguous,
  AmbiguousMultiplicity,
  HenselCondition,
  UnboundedTail,
  InvalidChar,
  DataMissing,
  Schema,
  SplitCondition,
  ConstantTerm,
  MismatchedKey,
  EngineMissing,
  Timeout,
  ParseFailure,
  TaskUnsupported,
  Io,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the library carries a machine-readable code; the
// message holds the human-readable detail (valuation witness, JSON pointer,
// raw engine output, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace ggc
