#include <string>

#include "ratex/errors.hpp"
#include "ratex/ident.hpp"
#include "ratex/linalg.hpp"

namespace ratex {

Matrix ds_matrix(const Model& model) {
  const int n = model.n, m = model.m, kappa = model.kappa;
  const int K = 1 + (n + 1) * kappa;
  Matrix D = Matrix::Zero(n * K, (n + m) * K);
  for (int r = 0; r < K; ++r) {
    for (int c = r; c < K && c - r <= kappa; ++c) {
      D.block(r * n, c * n, n, n) = model.B.coeff(c - r);
      D.block(r * n, n * K + c * m, n, m) = model.A.coeff(c - r);
    }
  }
  return D;
}

RankReport ds_criterion(const Model& model, const AffineRestriction& r, double tol_rank) {
  if (model.lambda > 0) throw Error(ErrorKind::InvalidArgument, "the structural criterion needs lambda = 0");
  if (r.equation) throw Error(ErrorKind::InvalidRestriction, "the structural criterion takes system restrictions");
  const int n = model.n, m = model.m, kappa = model.kappa;
  const int K = 1 + (n + 1) * kappa;
  const Eigen::Index width = restriction_width(n, m, kappa, 0, false);
  if (r.R.cols() != width) {
    throw Error(ErrorKind::InvalidRestriction,
                "R has " + std::to_string(r.R.cols()) + " columns, expected " + std::to_string(width));
  }

  // Columns of [Y_0..Y_{K-1} | X_0..X_{K-1}] kept by E, in the order of
  // [Y_0..Y_k | X_0..X_k]; the rest form E_perp.
  std::vector<Eigen::Index> kept, dropped;
  for (Eigen::Index col = 0; col < n * K; ++col) (col < n * (kappa + 1) ? kept : dropped).push_back(col);
  for (Eigen::Index col = 0; col < m * K; ++col) (col < m * (kappa + 1) ? kept : dropped).push_back(n * K + col);

  const Eigen::Index total = static_cast<Eigen::Index>(n) * (n + m) * K;
  auto selector = [&](const std::vector<Eigen::Index>& cols) {
    Matrix S = Matrix::Zero(static_cast<Eigen::Index>(cols.size()) * n, total);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      for (int a = 0; a < n; ++a) S(static_cast<Eigen::Index>(k) * n + a, cols[k] * n + a) = 1.0;
    }
    return S;
  };
  const Matrix E = selector(kept);
  const Matrix E_perp = selector(dropped);

  Matrix R_ds(r.R.rows() + E_perp.rows(), total);
  R_ds.topRows(r.R.rows()) = r.R * E;
  R_ds.bottomRows(E_perp.rows()) = E_perp;
  const Matrix M = R_ds * kron_identity(ds_matrix(model).transpose(), n);
  return rank_report(M, n * n * K, tol_rank);
}

}  // namespace ratex
