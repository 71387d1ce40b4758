#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace ratex {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Real Laurent polynomial matrix  sum_{k=min_lag}^{max_lag} M_k z^k.
///
/// Values are kept in trimmed form: the outermost coefficient matrices are
/// nonzero unless the whole matrix is zero, in which case a single zero
/// coefficient sits at lag 0. A coefficient counts as zero when its largest
/// entry is at most kTrimTolerance times max(1, largest entry overall).
class LaurentMatrix {
 public:
  static constexpr double kTrimTolerance = 1e-12;

  /// Zero matrix of the given shape.
  LaurentMatrix(Eigen::Index rows, Eigen::Index cols);

  /// Coefficients at lags min_lag, min_lag+1, ...; all must share one shape.
  LaurentMatrix(int min_lag, std::vector<Matrix> coeffs);

  static LaurentMatrix identity(Eigen::Index n);
  static LaurentMatrix constant(const Matrix& m);
  static LaurentMatrix monomial(const Matrix& m, int lag);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  int min_lag() const { return min_lag_; }
  int max_lag() const { return min_lag_ + static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const;

  /// Coefficient at `lag`; zero outside the stored range.
  Matrix coeff(int lag) const;
  const std::vector<Matrix>& coeffs() const { return coeffs_; }

  /// Coefficients for lags lo..hi inclusive, zero-padded.
  std::vector<Matrix> window(int lo, int hi) const;

  /// Largest absolute entry over all coefficients.
  double max_abs() const;

  CMatrix evaluate(Complex z) const;

  LaurentMatrix transpose() const;
  /// Terms with lag >= 0.
  LaurentMatrix positive_part() const;
  /// Terms with lag < 0.
  LaurentMatrix negative_part() const;

  LaurentMatrix operator-() const;
  LaurentMatrix operator*(double s) const;
  /// Right multiplication by a constant matrix.
  LaurentMatrix right_multiply(const Matrix& m) const;
  LaurentMatrix left_multiply(const Matrix& m) const;

 private:
  void trim();

  Eigen::Index rows_;
  Eigen::Index cols_;
  int min_lag_ = 0;
  std::vector<Matrix> coeffs_;
};

/// Coefficient-wise sum over the union of lag ranges.
LaurentMatrix operator+(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix operator-(const LaurentMatrix& a, const LaurentMatrix& b);
/// Cauchy product of the coefficient sequences.
LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b);

/// Largest absolute coefficient difference over all lags.
double max_abs_difference(const LaurentMatrix& a, const LaurentMatrix& b);

enum class SeriesDirection {
  /// Expansion in non-negative powers of z; requires min_lag >= 0.
  Positive,
  /// Expansion in non-positive powers of z; requires max_lag <= 0.
  Negative,
};

/// First horizon+1 coefficients of the matrix power-series inverse of `a`.
///
/// For SeriesDirection::Negative the k-th returned matrix multiplies z^{-k}.
/// Throws SingularLeadingCoefficient when the lag-0 coefficient is not
/// invertible.
std::vector<Matrix> inverse_series(const LaurentMatrix& a, int horizon,
                                   SeriesDirection direction = SeriesDirection::Positive);

/// Determinant of z^{-min_lag} a(z) and its zeros.
struct DeterminantZeros {
  /// Ascending coefficients of det(z^{-min_lag} a(z)).
  Vector poly;
  std::vector<Complex> zeros;
};

/// Determinant polynomial by interpolation on the unit circle; zeros from the
/// balanced companion matrix. Throws IdenticallySingular when det vanishes.
DeterminantZeros determinant_zeros(const LaurentMatrix& a);

/// Zeros of a real polynomial given by ascending coefficients.
std::vector<Complex> polynomial_zeros(const Vector& ascending);

}  // namespace ratex
