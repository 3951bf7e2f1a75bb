#pragma once

#include <stdexcept>
#include <string>

namespace pencil {

enum class ErrorCode {
  NotPrime,
  SizeCapExceeded,
  DivisionByZero,
  FieldMismatch,
  NoEmbedding,
  ZeroPolynomial,
  SingularMatrix,
  LeadingCoefficientVanishes,
  Proportional,
  CommonFactor,
  DegreeCharClash,
  NoGoodPosition,
  ExtensionTooLarge,
  InternalCountError,
  EmptySpectrum,
  NotCubic,
  Char3,
  PointIsRational,
  ConjugateEqualsPoint,
  DescentStuck,
  GenerationExhausted,
  InvalidInput,
  Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pencil
