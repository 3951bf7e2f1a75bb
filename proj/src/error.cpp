#include "pencil/error.hpp"

namespace pencil {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::NoEmbedding: return "NoEmbedding";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::LeadingCoefficientVanishes: return "LeadingCoefficientVanishes";
    case ErrorCode::Proportional: return "Proportional";
    case ErrorCode::CommonFactor: return "CommonFactor";
    case ErrorCode::DegreeCharClash: return "DegreeCharClash";
    case ErrorCode::NoGoodPosition: return "NoGoodPosition";
    case ErrorCode::ExtensionTooLarge: return "ExtensionTooLarge";
    case ErrorCode::InternalCountError: return "InternalCountError";
    case ErrorCode::EmptySpectrum: return "EmptySpectrum";
    case ErrorCode::NotCubic: return "NotCubic";
    case ErrorCode::Char3: return "Char3";
    case ErrorCode::PointIsRational: return "PointIsRational";
    case ErrorCode::ConjugateEqualsPoint: return "ConjugateEqualsPoint";
    case ErrorCode::DescentStuck: return "DescentStuck";
    case ErrorCode::GenerationExhausted: return "GenerationExhausted";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace pencil
