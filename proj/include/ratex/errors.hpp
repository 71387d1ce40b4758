#pragma once

#include <stdexcept>
#include <string>

namespace ratex {

enum class ErrorKind {
  ShapeMismatch,
  NonFinite,
  SingularLeadingCoefficient,
  IdenticallySingular,
  ZerosOnUnitCircle,
  WrongStableCount,
  DivisorExtractionSingular,
  RankDeficientC0,
  NotInvertible,
  SingularOnGrid,
  InsufficientHorizon,
  LagBoundMismatch,
  InvalidRestriction,
  Parse,
  Evaluation,
  Jacobian,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax or name-resolution failure inside an expression; positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace ratex
