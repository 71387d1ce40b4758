#include "ratex/errors.hpp"

namespace ratex {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularLeadingCoefficient: return "SingularLeadingCoefficient";
    case ErrorKind::IdenticallySingular: return "IdenticallySingular";
    case ErrorKind::ZerosOnUnitCircle: return "ZerosOnUnitCircle";
    case ErrorKind::WrongStableCount: return "WrongStableCount";
    case ErrorKind::DivisorExtractionSingular: return "DivisorExtractionSingular";
    case ErrorKind::RankDeficientC0: return "RankDeficientC0";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::SingularOnGrid: return "SingularOnGrid";
    case ErrorKind::InsufficientHorizon: return "InsufficientHorizon";
    case ErrorKind::LagBoundMismatch: return "LagBoundMismatch";
    case ErrorKind::InvalidRestriction: return "InvalidRestriction";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Evaluation: return "Evaluation";
    case ErrorKind::Jacobian: return "Jacobian";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(ErrorKind::Parse,
            message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

}  // namespace ratex
