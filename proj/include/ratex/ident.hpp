#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ratex/solution.hpp"

namespace ratex {

/// T, H and P built from the transfer coefficients.
struct IdentSystem {
  int n = 0;
  int m = 0;
  int kappa = 0;
  int lambda = 0;
  /// n(k+l+1) x m(k+l+1), block (r, c) = C_{c-r}.
  Matrix T;
  /// n(k+l+1) x nm k, block (r, c) = C_{k+l+1-r+c}.
  Matrix H;
  /// [[-T, -H], [I, 0]].
  Matrix P;
  Vector hankel_singular_values;
  int hankel_rank = 0;
  int mcmillan_delta = 0;
};

/// Throws InsufficientHorizon when fewer than (n+1) kappa + lambda + 1
/// coefficients are available.
IdentSystem build_ident_system(const TransferSeries& c, int n, int m, int kappa, int lambda,
                               double tol_rank = Tolerances{}.rank);

IdentSystem build_ident_system(const SolutionBundle& bundle, double tol_rank = Tolerances{}.rank);

/// n^2 (k+l+1) - n * hankel_rank.
int equivalence_class_dim(const IdentSystem& sys);

/// Same dimension computed as n * nullity(P').
int equivalence_class_dim_from_kernel(const IdentSystem& sys, double tol_rank = Tolerances{}.rank);

/// [B_{b_lo} .. B_hi | X_{x_lo} .. X_hi], where X is A^+ (kernel tests) or A
/// (restrictions).
Matrix coefficient_block(const LaurentMatrix& B, int b_lo, const LaurentMatrix& X, int x_lo, int hi);

struct EquivalenceResult {
  bool equivalent = false;
  double residual = 0.0;
  double threshold = 0.0;
};

/// Kernel criterion: (P' (x) I_n) vec([B~ | A~^+]) = 0 with P built from `a`.
EquivalenceResult obs_equivalent(const SolutionBundle& a, const Model& b, double tol = 1e-8,
                                 const Tolerances& wh_tol = {});

/// Spectral oracle: max |f_a - f_b| over a K-point grid, relative to max |f_a|.
EquivalenceResult spectral_equivalent(const SolutionBundle& a, const SolutionBundle& b, int grid_points = 64,
                                      double tol = 1e-10);

struct RankReport {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Vector singular_values;
  int numerical_rank = 0;
  int required_rank = 0;
  bool identified = false;
  /// sigma_required / sigma_max, zero when there are fewer singular values.
  double gap_ratio = 0.0;
  /// Relative rank threshold tol_rank * max(rows, cols).
  double threshold = 0.0;
  /// gap_ratio within a factor 10 of the threshold on either side.
  bool borderline = false;
  std::vector<std::string> warnings;
};

RankReport rank_report(const Matrix& M, int required_rank, double tol_rank);

/// R vec([B_{-l}..B_k | A_0..A_k]) = u, or, when `equation` is set, the same
/// for row `equation` (0-based) alone.
struct AffineRestriction {
  Matrix R;
  Vector u;
  std::optional<int> equation;
};

/// Number of columns R must have: n^2(k+l+1) + nm(k+1) in system mode,
/// n(k+l+1) + m(k+1) in equation mode.
Eigen::Index restriction_width(int n, int m, int kappa, int lambda, bool equation_mode);

/// Restriction coordinates of a model point, in the vec ordering.
Vector restriction_coordinates(const Model& model, std::optional<int> equation = std::nullopt);

/// M = [P' (x) I_n; R_bar] with R_bar = [R_B, 0, R_A].
Matrix ident_matrix(const IdentSystem& sys, const Matrix& R);
/// M_i = [P'; R_bar_i].
Matrix ident_matrix_equation(const IdentSystem& sys, const Matrix& Ri);

RankReport ident_test_affine(const IdentSystem& sys, const AffineRestriction& r, const Model& point,
                             double tol_rank = Tolerances{}.rank);
RankReport ident_test_equation(const IdentSystem& sys, const AffineRestriction& r, const Model& point,
                               double tol_rank = Tolerances{}.rank);

/// Block-Toeplitz structural matrix with 1 + (n+1) kappa block rows.
Matrix ds_matrix(const Model& model);

/// Rank test of R_DS (D' (x) I_n); requires lambda = 0 and a system-mode
/// restriction over vec([B_0..B_k | A_0..A_k]).
RankReport ds_criterion(const Model& model, const AffineRestriction& r, double tol_rank = Tolerances{}.rank);

}  // namespace ratex
