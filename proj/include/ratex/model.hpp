#pragma once

#include "ratex/laurent_matrix.hpp"

namespace ratex {

/// A point (B, A) of the model space with declared lag bounds.
///
/// B is n x n with lags inside [-lambda, kappa]; A is n x m with lags inside
/// [0, kappa]. The declared bounds may be looser than the trimmed lags; the
/// identification matrices are sized by the declared values.
struct Model {
  LaurentMatrix B;
  LaurentMatrix A;
  int n = 0;
  int m = 0;
  int lambda = 0;
  int kappa = 0;

  Model(LaurentMatrix b, LaurentMatrix a, int lambda, int kappa);

  /// Bounds taken from the trimmed lags of B and A.
  static Model tight(LaurentMatrix b, LaurentMatrix a);
};

}  // namespace ratex
