#include "ratex/ident.hpp"

#include <algorithm>
#include <string>

#include "ratex/errors.hpp"
#include "ratex/linalg.hpp"

namespace ratex {

IdentSystem build_ident_system(const TransferSeries& c, int n, int m, int kappa, int lambda, double tol_rank) {
  if (n < 1 || m < 1 || kappa < 0 || lambda < 0) throw Error(ErrorKind::InvalidArgument, "invalid dimensions");
  const int need = (n + 1) * kappa + lambda;
  if (c.horizon() < need) {
    throw Error(ErrorKind::InsufficientHorizon, "transfer horizon " + std::to_string(c.horizon()) +
                                                    " < (n+1)kappa+lambda = " + std::to_string(need));
  }
  if (c[0].rows() != n || c[0].cols() != m) throw Error(ErrorKind::ShapeMismatch, "transfer coefficients are not n x m");

  IdentSystem s;
  s.n = n;
  s.m = m;
  s.kappa = kappa;
  s.lambda = lambda;
  const int w = kappa + lambda + 1;
  s.T = Matrix::Zero(n * w, m * w);
  for (int r = 0; r < w; ++r) {
    for (int col = r; col < w; ++col) s.T.block(r * n, col * m, n, m) = c[col - r];
  }
  const int hb = n * kappa;
  s.H = Matrix::Zero(n * w, m * hb);
  for (int r = 0; r < w; ++r) {
    for (int col = 0; col < hb; ++col) s.H.block(r * n, col * m, n, m) = c[w - r + col];
  }
  s.P = Matrix::Zero((n + m) * w, m * w + m * hb);
  s.P.topLeftCorner(n * w, m * w) = -s.T;
  if (hb > 0) s.P.topRightCorner(n * w, m * hb) = -s.H;
  s.P.block(n * w, 0, m * w, m * w).setIdentity();

  if (hb > 0) {
    s.hankel_singular_values = singular_values(s.H);
    // Threshold relative to the scale of [T H], so a tiny Hankel block is not
    // promoted to full rank by its own sigma_max.
    const double scale = singular_values(s.P.topRows(n * w))(0);
    const double threshold = tol_rank * scale * static_cast<double>(std::max(s.H.rows(), s.H.cols()));
    for (Eigen::Index k = 0; k < s.hankel_singular_values.size(); ++k) {
      s.hankel_rank += s.hankel_singular_values(k) > threshold ? 1 : 0;
    }
  }
  s.mcmillan_delta = s.hankel_rank;
  return s;
}

IdentSystem build_ident_system(const SolutionBundle& bundle, double tol_rank) {
  const Model& md = bundle.model;
  return build_ident_system(bundle.transfer, md.n, md.m, md.kappa, md.lambda, tol_rank);
}

int equivalence_class_dim(const IdentSystem& sys) {
  const int dim = sys.n * sys.n * (sys.kappa + sys.lambda + 1) - sys.n * sys.hankel_rank;
  if (dim < sys.n * sys.n * (1 + sys.lambda)) {
    throw Error(ErrorKind::InvalidArgument, "equivalence class dimension below n^2(1+lambda)");
  }
  return dim;
}

int equivalence_class_dim_from_kernel(const IdentSystem& sys, double tol_rank) {
  const Matrix pt = sys.P.transpose();
  return sys.n * static_cast<int>(pt.cols() - numerical_rank(pt, tol_rank));
}

Matrix coefficient_block(const LaurentMatrix& B, int b_lo, const LaurentMatrix& X, int x_lo, int hi) {
  std::vector<Matrix> blocks = B.window(b_lo, hi);
  for (auto& x : X.window(x_lo, hi)) blocks.push_back(std::move(x));
  return hconcat(blocks);
}

namespace {

void require_within(const LaurentMatrix& x, int lo, int hi, const char* what) {
  if (x.is_zero()) return;
  if (x.min_lag() < lo || x.max_lag() > hi) {
    throw Error(ErrorKind::LagBoundMismatch, std::string(what) + " has lags " + std::to_string(x.min_lag()) + ".." +
                                                 std::to_string(x.max_lag()) + " outside " + std::to_string(lo) +
                                                 ".." + std::to_string(hi));
  }
}

}  // namespace

EquivalenceResult obs_equivalent(const SolutionBundle& a, const Model& b, double tol, const Tolerances& wh_tol) {
  const Model& ma = a.model;
  if (b.n != ma.n || b.m != ma.m) throw Error(ErrorKind::ShapeMismatch, "models have different dimensions");
  const SolutionBundle sb = solve_model(b, 0, wh_tol);
  require_within(b.B, -ma.lambda, ma.kappa, "B");
  require_within(sb.a_plus, -ma.lambda, ma.kappa, "A^+");

  const IdentSystem sys = build_ident_system(a);
  const Matrix X = coefficient_block(b.B, -ma.lambda, sb.a_plus, -ma.lambda, ma.kappa);
  // (P' (x) I_n) vec(X) = vec(X P)
  EquivalenceResult r;
  r.residual = (X * sys.P).cwiseAbs().maxCoeff();
  r.threshold = tol * std::max(1.0, X.cwiseAbs().maxCoeff()) * std::max(1.0, sys.P.cwiseAbs().maxCoeff());
  r.equivalent = r.residual <= r.threshold;
  return r;
}

EquivalenceResult spectral_equivalent(const SolutionBundle& a, const SolutionBundle& b, int grid_points,
                                      double tol) {
  if (a.model.n != b.model.n) throw Error(ErrorKind::ShapeMismatch, "models have different dimensions");
  const auto grid = unit_circle_grid(grid_points);
  const auto fa = spectral_density(a.model.B, a.a_plus, grid);
  const auto fb = spectral_density(b.model.B, b.a_plus, grid);
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    diff = std::max(diff, (fa[k] - fb[k]).cwiseAbs().maxCoeff());
    scale = std::max(scale, fa[k].cwiseAbs().maxCoeff());
  }
  EquivalenceResult r;
  r.residual = diff;
  r.threshold = tol * std::max(1.0, scale);
  r.equivalent = diff <= r.threshold;
  return r;
}

RankReport rank_report(const Matrix& M, int required_rank, double tol_rank) {
  RankReport r;
  r.rows = M.rows();
  r.cols = M.cols();
  r.singular_values = singular_values(M);
  r.numerical_rank = numerical_rank(r.singular_values, M.rows(), M.cols(), tol_rank);
  r.required_rank = required_rank;
  r.identified = r.numerical_rank == required_rank;
  r.threshold = tol_rank * static_cast<double>(std::max(M.rows(), M.cols()));
  if (required_rank >= 1 && r.singular_values.size() >= required_rank && r.singular_values(0) > 0.0) {
    r.gap_ratio = r.singular_values(required_rank - 1) / r.singular_values(0);
  }
  r.borderline = r.gap_ratio > r.threshold / 10.0 && r.gap_ratio < r.threshold * 10.0;
  return r;
}

Eigen::Index restriction_width(int n, int m, int kappa, int lambda, bool equation_mode) {
  const int w = kappa + lambda + 1;
  return equation_mode ? n * w + m * (kappa + 1) : n * n * w + n * m * (kappa + 1);
}

Vector restriction_coordinates(const Model& model, std::optional<int> equation) {
  const Matrix X = coefficient_block(model.B, -model.lambda, model.A, 0, model.kappa);
  if (equation) {
    if (*equation < 0 || *equation >= model.n) throw Error(ErrorKind::InvalidRestriction, "equation index out of range");
    return X.row(*equation).transpose();
  }
  return vec(X);
}

Matrix ident_matrix(const IdentSystem& sys, const Matrix& R) {
  const int n = sys.n, m = sys.m, w = sys.kappa + sys.lambda + 1;
  if (R.cols() != restriction_width(n, m, sys.kappa, sys.lambda, false)) {
    throw Error(ErrorKind::InvalidRestriction, "R has " + std::to_string(R.cols()) + " columns, expected " +
                                                   std::to_string(restriction_width(n, m, sys.kappa, sys.lambda, false)));
  }
  const Matrix top = kron_identity(sys.P.transpose(), n);
  const Eigen::Index nb = n * n * w;
  Matrix M = Matrix::Zero(top.rows() + R.rows(), top.cols());
  M.topRows(top.rows()) = top;
  M.bottomLeftCorner(R.rows(), nb) = R.leftCols(nb);
  M.bottomRightCorner(R.rows(), R.cols() - nb) = R.rightCols(R.cols() - nb);
  return M;
}

Matrix ident_matrix_equation(const IdentSystem& sys, const Matrix& Ri) {
  const int n = sys.n, m = sys.m, w = sys.kappa + sys.lambda + 1;
  if (Ri.cols() != restriction_width(n, m, sys.kappa, sys.lambda, true)) {
    throw Error(ErrorKind::InvalidRestriction, "R_i has " + std::to_string(Ri.cols()) + " columns, expected " +
                                                   std::to_string(restriction_width(n, m, sys.kappa, sys.lambda, true)));
  }
  const Matrix top = sys.P.transpose();
  const Eigen::Index nb = n * w;
  Matrix M = Matrix::Zero(top.rows() + Ri.rows(), top.cols());
  M.topRows(top.rows()) = top;
  M.bottomLeftCorner(Ri.rows(), nb) = Ri.leftCols(nb);
  M.bottomRightCorner(Ri.rows(), Ri.cols() - nb) = Ri.rightCols(Ri.cols() - nb);
  return M;
}

namespace {

void validate_restriction(const AffineRestriction& r, const Model& point, std::vector<std::string>& warnings) {
  if (r.u.size() != r.R.rows()) throw Error(ErrorKind::InvalidRestriction, "u length differs from the rows of R");
  if (r.R.rows() == 0) throw Error(ErrorKind::InvalidRestriction, "restriction set is empty");
  if (r.u.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorKind::InvalidRestriction, "u = 0 is not allowed: it admits the zero parameter and all its multiples");
  }
  const Vector x = restriction_coordinates(point, r.equation);
  if (x.size() != r.R.cols()) throw Error(ErrorKind::InvalidRestriction, "R does not match the coordinate count");
  const double resid = (r.R * x - r.u).cwiseAbs().maxCoeff();
  if (resid > 1e-8 * (1.0 + r.u.cwiseAbs().maxCoeff())) {
    warnings.push_back("restrictions not satisfied at the point (residual " + std::to_string(resid) + ")");
  }
  if (numerical_rank(r.R, 1e-10) < r.R.rows()) warnings.push_back("restriction matrix R is not of full row rank");
}

}  // namespace

RankReport ident_test_affine(const IdentSystem& sys, const AffineRestriction& r, const Model& point, double tol_rank) {
  if (r.equation) throw Error(ErrorKind::InvalidRestriction, "equation-wise restriction passed to the system test");
  std::vector<std::string> warnings;
  validate_restriction(r, point, warnings);
  RankReport rep = rank_report(ident_matrix(sys, r.R), sys.n * (sys.n + sys.m) * (sys.kappa + sys.lambda + 1), tol_rank);
  rep.warnings = std::move(warnings);
  return rep;
}

RankReport ident_test_equation(const IdentSystem& sys, const AffineRestriction& r, const Model& point,
                               double tol_rank) {
  if (!r.equation) throw Error(ErrorKind::InvalidRestriction, "equation index missing");
  if (*r.equation < 0 || *r.equation >= sys.n) throw Error(ErrorKind::InvalidRestriction, "equation index out of range");
  std::vector<std::string> warnings;
  validate_restriction(r, point, warnings);
  RankReport rep = rank_report(ident_matrix_equation(sys, r.R), (sys.n + sys.m) * (sys.kappa + sys.lambda + 1), tol_rank);
  rep.warnings = std::move(warnings);
  return rep;
}

}  // namespace ratex
