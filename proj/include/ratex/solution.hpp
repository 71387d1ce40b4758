#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ratex/model.hpp"
#include "ratex/wiener_hopf.hpp"

namespace ratex {

/// Taylor coefficients C_0..C_N of the transfer function.
struct TransferSeries {
  std::vector<Matrix> coeffs;

  int horizon() const { return static_cast<int>(coeffs.size()) - 1; }
  const Matrix& operator[](int j) const { return coeffs[static_cast<std::size_t>(j)]; }
};

struct SolutionBundle {
  Model model;
  WHFactors factors;
  /// [B_-^{-1} A]_+, lags 0..kappa.
  LaurentMatrix ma_part;
  /// A^+ = B_- [B_-^{-1} A]_+, lags -lambda..kappa.
  LaurentMatrix a_plus;
  TransferSeries transfer;
  bool c0_canonical = false;
  int c0_rank = 0;
};

/// Coefficient k of the result is sum_{i=0}^{kappa-k} F^i A_{k+i}, where F^i
/// are the z^{-i} coefficients of B_-^{-1}.
LaurentMatrix plus_part_of_bminus_inv_a(const LaurentMatrix& b_minus, const LaurentMatrix& A);

LaurentMatrix a_plus(const LaurentMatrix& b_minus, const LaurentMatrix& ma_part);

/// Solves B_+ C = ma_part on lags 0..horizon by matrix long division.
TransferSeries transfer_series(const LaurentMatrix& b_plus, const LaurentMatrix& ma_part, int horizon);

/// Horizon needed by the identification matrices: (n+1) kappa + lambda.
int identification_horizon(const Model& model);

/// Factorizes B and builds every solution object. The transfer horizon is
/// raised to identification_horizon(model) when smaller.
SolutionBundle solve_model(const Model& model, int horizon = 0, const Tolerances& tol = {});

/// Staircase test: column j's first entry above `tol` is positive and sits
/// strictly below the pivot row of column j-1.
bool is_canonical_lower(const Matrix& c0, double tol = 1e-12);

enum class InvertibilityStatus { Invertible, Boundary, NotInvertible };

struct InvertibilityReport {
  InvertibilityStatus status = InvertibilityStatus::Invertible;
  /// "zeros" when decided by determinant zeros, "grid" for the disk screen.
  std::string method;
  /// Smallest zero modulus (n == m) or smallest scaled singular value (grid).
  double margin = 0.0;
};

/// rank([B_-^{-1}A]_+(z)) = m on the open unit disk.
InvertibilityReport check_invertibility(const LaurentMatrix& ma_part, const Tolerances& tol = {});

struct CanonicalForm {
  /// Orthogonal m x m rotation with C_0 V canonical.
  Matrix V;
  bool was_canonical = false;
  SolutionBundle bundle;
  InvertibilityReport invertibility;
};

/// Throws RankDeficientC0 or NotInvertible.
CanonicalForm cf_check_and_normalize(const SolutionBundle& bundle, const Tolerances& tol = {});

/// f(z) = K(z) K(z)^H with K = B(z)^{-1} A^+(z), for z on the unit circle.
std::vector<CMatrix> spectral_density(const LaurentMatrix& B, const LaurentMatrix& a_plus,
                                      const std::vector<Complex>& grid);

/// K equally spaced points exp(i 2 pi k / K), k = 0..K-1.
std::vector<Complex> unit_circle_grid(int points);

/// Autocovariances Gamma(k) = E[y_t y_{t-k}'] for k = 0..max_lag from the
/// transfer coefficients.
std::vector<Matrix> autocovariances(const TransferSeries& c, int max_lag);

struct SimulationConfig {
  std::uint64_t seed = 1;
  /// 0 selects the truncation rule on the transfer coefficients.
  int truncation = 0;
};

/// Smallest h > deg(ma_part) such that C_h and the following
/// max(1, deg B_+) - 1 coefficients all have max-abs < 1e-12 max|C_0|
/// (capped at 10^4). The run guards against isolated near-zero terms.
int default_truncation(const SolutionBundle& bundle);

/// T x n sample path of y_t = sum_j C_j eps_{t-j}, eps ~ N(0, I_m).
Matrix simulate(const SolutionBundle& bundle, int T, const SimulationConfig& config = {});

}  // namespace ratex
