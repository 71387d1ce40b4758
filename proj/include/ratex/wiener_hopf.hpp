#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ratex/errors.hpp"
#include "ratex/laurent_matrix.hpp"
#include "ratex/tolerances.hpp"

namespace ratex {

/// B = B_- B_+ with B_- = I + sum_{i=1}^{lambda} F_i z^{-i} and B_+ a
/// polynomial matrix invertible on the closed unit disk.
struct WHFactors {
  LaurentMatrix b_minus;
  LaurentMatrix b_plus;
  /// Max-abs coefficient of B - B_- B_+.
  double residual = 0.0;
  int lambda = 0;
  /// Finite zeros of det(z^lambda B(z)), inside ones first.
  std::vector<Complex> zeros;
  int stable_count = 0;
};

/// Factorizes B, or throws ZerosOnUnitCircle, WrongStableCount or
/// DivisorExtractionSingular when no factorization with zero partial
/// indices exists.
WHFactors wh_factorize(const LaurentMatrix& B, const Tolerances& tol = {});

struct EUDiagnostic {
  bool holds = false;
  std::optional<ErrorKind> failure;
  std::string message;
  std::vector<Complex> zeros;
  int stable_count = 0;
  int required_stable = 0;
};

EUDiagnostic check_eu(const LaurentMatrix& B, const Tolerances& tol = {});

}  // namespace ratex
