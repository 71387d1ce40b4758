#include "ratex/laurent_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ratex/errors.hpp"

namespace ratex {

namespace {

void require_same_shape(const LaurentMatrix& a, const LaurentMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::ShapeMismatch,
                std::string(what) + ": shapes " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()) + " differ");
  }
}

}  // namespace

LaurentMatrix::LaurentMatrix(Eigen::Index rows, Eigen::Index cols)
    : rows_(rows), cols_(cols), min_lag_(0), coeffs_{Matrix::Zero(rows, cols)} {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::ShapeMismatch, "LaurentMatrix needs positive dimensions");
  }
}

LaurentMatrix::LaurentMatrix(int min_lag, std::vector<Matrix> coeffs)
    : min_lag_(min_lag), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "LaurentMatrix needs at least one coefficient");
  }
  rows_ = coeffs_.front().rows();
  cols_ = coeffs_.front().cols();
  if (rows_ < 1 || cols_ < 1) {
    throw Error(ErrorKind::ShapeMismatch, "LaurentMatrix needs positive dimensions");
  }
  for (const auto& c : coeffs_) {
    if (c.rows() != rows_ || c.cols() != cols_) {
      throw Error(ErrorKind::ShapeMismatch, "coefficient matrices must share one shape");
    }
    if (!c.allFinite()) {
      throw Error(ErrorKind::NonFinite, "LaurentMatrix coefficients must be finite");
    }
  }
  trim();
}

LaurentMatrix LaurentMatrix::identity(Eigen::Index n) {
  return LaurentMatrix(0, {Matrix::Identity(n, n)});
}

LaurentMatrix LaurentMatrix::constant(const Matrix& m) { return LaurentMatrix(0, {m}); }

LaurentMatrix LaurentMatrix::monomial(const Matrix& m, int lag) { return LaurentMatrix(lag, {m}); }

void LaurentMatrix::trim() {
  double scale = 1.0;
  for (const auto& c : coeffs_) scale = std::max(scale, c.cwiseAbs().maxCoeff());
  const double threshold = kTrimTolerance * scale;
  auto negligible = [threshold](const Matrix& c) { return c.cwiseAbs().maxCoeff() <= threshold; };

  std::size_t first = 0;
  while (first < coeffs_.size() && negligible(coeffs_[first])) ++first;
  if (first == coeffs_.size()) {
    coeffs_.assign(1, Matrix::Zero(rows_, cols_));
    min_lag_ = 0;
    return;
  }
  std::size_t last = coeffs_.size() - 1;
  while (negligible(coeffs_[last])) --last;
  coeffs_ = std::vector<Matrix>(coeffs_.begin() + static_cast<std::ptrdiff_t>(first),
                                coeffs_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  min_lag_ += static_cast<int>(first);
}

bool LaurentMatrix::is_zero() const {
  return coeffs_.size() == 1 && min_lag_ == 0 && coeffs_.front().isZero(0.0);
}

Matrix LaurentMatrix::coeff(int lag) const {
  if (lag < min_lag() || lag > max_lag()) return Matrix::Zero(rows_, cols_);
  return coeffs_[static_cast<std::size_t>(lag - min_lag_)];
}

std::vector<Matrix> LaurentMatrix::window(int lo, int hi) const {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(std::max(0, hi - lo + 1)));
  for (int k = lo; k <= hi; ++k) out.push_back(coeff(k));
  return out;
}

double LaurentMatrix::max_abs() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s = std::max(s, c.cwiseAbs().maxCoeff());
  return s;
}

CMatrix LaurentMatrix::evaluate(Complex z) const {
  // Horner in z over the shifted polynomial, then multiply by z^{min_lag}.
  CMatrix acc = CMatrix::Zero(rows_, cols_);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * z + it->cast<Complex>();
  }
  return acc * std::pow(z, min_lag_);
}

LaurentMatrix LaurentMatrix::transpose() const {
  std::vector<Matrix> t;
  t.reserve(coeffs_.size());
  for (const auto& c : coeffs_) t.push_back(c.transpose());
  return LaurentMatrix(min_lag_, std::move(t));
}

LaurentMatrix LaurentMatrix::positive_part() const {
  if (max_lag() < 0) return LaurentMatrix(rows_, cols_);
  return LaurentMatrix(std::max(0, min_lag_), window(std::max(0, min_lag_), max_lag()));
}

LaurentMatrix LaurentMatrix::negative_part() const {
  if (min_lag_ >= 0) return LaurentMatrix(rows_, cols_);
  return LaurentMatrix(min_lag_, window(min_lag_, std::min(-1, max_lag())));
}

LaurentMatrix LaurentMatrix::operator-() const { return *this * -1.0; }

LaurentMatrix LaurentMatrix::operator*(double s) const {
  std::vector<Matrix> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c * s);
  return LaurentMatrix(min_lag_, std::move(out));
}

LaurentMatrix LaurentMatrix::right_multiply(const Matrix& m) const {
  if (m.rows() != cols_) throw Error(ErrorKind::ShapeMismatch, "right_multiply: inner dimensions differ");
  std::vector<Matrix> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(c * m);
  return LaurentMatrix(min_lag_, std::move(out));
}

LaurentMatrix LaurentMatrix::left_multiply(const Matrix& m) const {
  if (m.cols() != rows_) throw Error(ErrorKind::ShapeMismatch, "left_multiply: inner dimensions differ");
  std::vector<Matrix> out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.push_back(m * c);
  return LaurentMatrix(min_lag_, std::move(out));
}

LaurentMatrix operator+(const LaurentMatrix& a, const LaurentMatrix& b) {
  require_same_shape(a, b, "lp_add");
  const int lo = std::min(a.min_lag(), b.min_lag());
  const int hi = std::max(a.max_lag(), b.max_lag());
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) out.push_back(a.coeff(k) + b.coeff(k));
  return LaurentMatrix(lo, std::move(out));
}

LaurentMatrix operator-(const LaurentMatrix& a, const LaurentMatrix& b) { return a + (-b); }

LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "lp_mul: inner dimensions " + std::to_string(a.cols()) +
                                              " and " + std::to_string(b.rows()) + " differ");
  }
  const auto& ac = a.coeffs();
  const auto& bc = b.coeffs();
  std::vector<Matrix> out(ac.size() + bc.size() - 1, Matrix::Zero(a.rows(), b.cols()));
  for (std::size_t i = 0; i < ac.size(); ++i) {
    for (std::size_t j = 0; j < bc.size(); ++j) out[i + j].noalias() += ac[i] * bc[j];
  }
  return LaurentMatrix(a.min_lag() + b.min_lag(), std::move(out));
}

double max_abs_difference(const LaurentMatrix& a, const LaurentMatrix& b) {
  require_same_shape(a, b, "max_abs_difference");
  const int lo = std::min(a.min_lag(), b.min_lag());
  const int hi = std::max(a.max_lag(), b.max_lag());
  double d = 0.0;
  for (int k = lo; k <= hi; ++k) d = std::max(d, (a.coeff(k) - b.coeff(k)).cwiseAbs().maxCoeff());
  return d;
}

std::vector<Matrix> inverse_series(const LaurentMatrix& a, int horizon, SeriesDirection direction) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeMismatch, "inverse_series: matrix must be square");
  if (horizon < 0) throw Error(ErrorKind::InvalidArgument, "inverse_series: negative horizon");
  if (direction == SeriesDirection::Positive && a.min_lag() < 0) {
    throw Error(ErrorKind::InvalidArgument, "inverse_series: power series in z needs min_lag >= 0");
  }
  if (direction == SeriesDirection::Negative && a.max_lag() > 0) {
    throw Error(ErrorKind::InvalidArgument, "inverse_series: series in 1/z needs max_lag <= 0");
  }
  const int sign = direction == SeriesDirection::Positive ? 1 : -1;
  auto term = [&](int k) { return a.coeff(sign * k); };
  const int degree = direction == SeriesDirection::Positive ? a.max_lag() : -a.min_lag();

  const Matrix lead = term(0);
  Eigen::FullPivLU<Matrix> lu(lead);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::SingularLeadingCoefficient,
                "inverse_series: coefficient at the expansion origin is singular");
  }

  const Eigen::Index n = a.rows();
  std::vector<Matrix> x;
  x.reserve(static_cast<std::size_t>(horizon) + 1);
  x.push_back(lu.inverse());
  for (int k = 1; k <= horizon; ++k) {
    Matrix rhs = Matrix::Zero(n, n);
    for (int j = 1; j <= std::min(k, degree); ++j) rhs.noalias() -= term(j) * x[static_cast<std::size_t>(k - j)];
    x.push_back(lu.solve(rhs));
  }
  return x;
}

}  // namespace ratex
