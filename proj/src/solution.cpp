#include "ratex/solution.hpp"

#include <algorithm>
#include <string>

#include "ratex/errors.hpp"
#include "ratex/linalg.hpp"

namespace ratex {

LaurentMatrix plus_part_of_bminus_inv_a(const LaurentMatrix& b_minus, const LaurentMatrix& A) {
  if (b_minus.rows() != A.rows()) throw Error(ErrorKind::ShapeMismatch, "B_- and A row counts differ");
  if (b_minus.max_lag() > 0) throw Error(ErrorKind::InvalidArgument, "B_- must have no positive lags");
  if (A.min_lag() < 0) throw Error(ErrorKind::InvalidArgument, "A must be a polynomial matrix");
  const int kappa = A.max_lag();
  const auto finv = inverse_series(b_minus, kappa, SeriesDirection::Negative);
  std::vector<Matrix> out;
  for (int k = 0; k <= kappa; ++k) {
    Matrix c = Matrix::Zero(A.rows(), A.cols());
    for (int i = 0; k + i <= kappa; ++i) c.noalias() += finv[static_cast<std::size_t>(i)] * A.coeff(k + i);
    out.push_back(std::move(c));
  }
  return LaurentMatrix(0, std::move(out));
}

LaurentMatrix a_plus(const LaurentMatrix& b_minus, const LaurentMatrix& ma_part) { return b_minus * ma_part; }

TransferSeries transfer_series(const LaurentMatrix& b_plus, const LaurentMatrix& ma_part, int horizon) {
  if (b_plus.rows() != b_plus.cols() || b_plus.rows() != ma_part.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "transfer_series: B_+ must be square and match ma_part");
  }
  if (b_plus.min_lag() < 0 || ma_part.min_lag() < 0) {
    throw Error(ErrorKind::InvalidArgument, "transfer_series: B_+ and ma_part must be polynomial");
  }
  if (horizon < 0) throw Error(ErrorKind::InvalidArgument, "transfer_series: negative horizon");
  Eigen::FullPivLU<Matrix> g0(b_plus.coeff(0));
  g0.setThreshold(1e-13);
  if (!g0.isInvertible()) throw Error(ErrorKind::SingularLeadingCoefficient, "B_+(0) is singular");

  const int kappa = b_plus.max_lag();
  TransferSeries c;
  c.coeffs.reserve(static_cast<std::size_t>(horizon) + 1);
  for (int j = 0; j <= horizon; ++j) {
    Matrix rhs = ma_part.coeff(j);
    for (int i = 1; i <= std::min(kappa, j); ++i) rhs.noalias() -= b_plus.coeff(i) * c[j - i];
    c.coeffs.push_back(g0.solve(rhs));
  }
  return c;
}

int identification_horizon(const Model& model) { return (model.n + 1) * model.kappa + model.lambda; }

SolutionBundle solve_model(const Model& model, int horizon, const Tolerances& tol) {
  WHFactors factors = wh_factorize(model.B, tol);
  LaurentMatrix ma = plus_part_of_bminus_inv_a(factors.b_minus, model.A);
  LaurentMatrix ap = a_plus(factors.b_minus, ma);
  TransferSeries c = transfer_series(factors.b_plus, ma, std::max(horizon, identification_horizon(model)));
  const int rank = numerical_rank(c[0], tol.rank);
  const bool canonical = rank == model.m && is_canonical_lower(c[0]);
  return SolutionBundle{model, std::move(factors), std::move(ma), std::move(ap), std::move(c), canonical, rank};
}

}  // namespace ratex
