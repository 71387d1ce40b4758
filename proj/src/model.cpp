#include "ratex/model.hpp"

#include <algorithm>
#include <string>

#include "ratex/errors.hpp"

namespace ratex {

Model::Model(LaurentMatrix b, LaurentMatrix a, int lambda_, int kappa_)
    : B(std::move(b)), A(std::move(a)), lambda(lambda_), kappa(kappa_) {
  if (B.rows() != B.cols()) throw Error(ErrorKind::ShapeMismatch, "B must be square");
  if (A.rows() != B.rows()) throw Error(ErrorKind::ShapeMismatch, "A must have as many rows as B");
  n = static_cast<int>(B.rows());
  m = static_cast<int>(A.cols());
  if (lambda < 0 || kappa < 0) throw Error(ErrorKind::LagBoundMismatch, "lag bounds must be non-negative");
  if (!B.is_zero() && (B.min_lag() < -lambda || B.max_lag() > kappa)) {
    throw Error(ErrorKind::LagBoundMismatch, "B has lags " + std::to_string(B.min_lag()) + ".." +
                                                 std::to_string(B.max_lag()) + " outside [-" +
                                                 std::to_string(lambda) + ", " + std::to_string(kappa) + "]");
  }
  if (!A.is_zero() && (A.min_lag() < 0 || A.max_lag() > kappa)) {
    throw Error(ErrorKind::LagBoundMismatch, "A has lags " + std::to_string(A.min_lag()) + ".." +
                                                 std::to_string(A.max_lag()) + " outside [0, " +
                                                 std::to_string(kappa) + "]");
  }
}

Model Model::tight(LaurentMatrix b, LaurentMatrix a) {
  const int lambda = std::max(0, -b.min_lag());
  const int kappa = std::max({0, b.max_lag(), a.max_lag()});
  return Model(std::move(b), std::move(a), lambda, kappa);
}

}  // namespace ratex
