#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ratex/errors.hpp"
#include "ratex/linalg.hpp"
#include "ratex/solution.hpp"

namespace ratex {

bool is_canonical_lower(const Matrix& c0, double tol) {
  const double threshold = tol * std::max(1.0, c0.cwiseAbs().maxCoeff());
  Eigen::Index previous = -1;
  for (Eigen::Index j = 0; j < c0.cols(); ++j) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = 0; i < c0.rows(); ++i) {
      if (std::abs(c0(i, j)) > threshold) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0 || pivot <= previous || c0(pivot, j) <= 0.0) return false;
    previous = pivot;
  }
  return true;
}

InvertibilityReport check_invertibility(const LaurentMatrix& ma_part, const Tolerances& tol) {
  InvertibilityReport r;
  const Eigen::Index n = ma_part.rows();
  const Eigen::Index m = ma_part.cols();
  if (n < m || ma_part.min_lag() > 0) {
    r.status = InvertibilityStatus::NotInvertible;
    r.method = n < m ? "rank" : "zeros";
    return r;
  }
  if (n == m) {
    r.method = "zeros";
    DeterminantZeros dz;
    try {
      dz = determinant_zeros(ma_part);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::IdenticallySingular) throw;
      r.status = InvertibilityStatus::NotInvertible;
      return r;
    }
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& z : dz.zeros) smallest = std::min(smallest, std::abs(z));
    r.margin = smallest;
    if (smallest <= 1.0 - tol.boundary) {
      r.status = InvertibilityStatus::NotInvertible;
    } else if (smallest <= 1.0 + tol.boundary) {
      r.status = InvertibilityStatus::Boundary;
    }
    return r;
  }

  // Tall case: screen the smallest singular value on a polar grid of the disk.
  r.method = "grid";
  const double scale = std::max(1.0, ma_part.max_abs());
  double worst = std::numeric_limits<double>::infinity();
  auto probe = [&](Complex z) {
    Eigen::JacobiSVD<CMatrix> svd(ma_part.evaluate(z));
    worst = std::min(worst, svd.singularValues()(m - 1) / scale);
  };
  probe(Complex(0.0, 0.0));
  for (int ri = 1; ri <= 9; ++ri) {
    for (int a = 0; a < 64; ++a) probe(std::polar(0.1 * ri, 2.0 * std::numbers::pi * a / 64.0));
  }
  r.margin = worst;
  if (worst <= 1e-9) r.status = InvertibilityStatus::NotInvertible;
  return r;
}

namespace {

// Householder reflections applied from the right, row by row, reduce C_0 to
// the staircase form; the product of the reflections is V.
Matrix staircase_rotation(const Matrix& c0) {
  const Eigen::Index n = c0.rows();
  const Eigen::Index m = c0.cols();
  Matrix x = c0;
  Matrix v = Matrix::Identity(m, m);
  const double threshold = 1e-12 * std::max(1.0, c0.cwiseAbs().maxCoeff());
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < n && p < m; ++i) {
    const Eigen::Index k = m - p;
    Vector row = x.block(i, p, 1, k).transpose();
    const double norm = row.norm();
    if (norm <= threshold) continue;
    // Reflect row onto +norm e_1.
    Vector h = row;
    const double tail = row.tail(k - 1).squaredNorm();
    h(0) = row(0) > 0.0 ? -tail / (row(0) + norm) : row(0) - norm;
    const double hh = h.squaredNorm();
    if (hh > 0.0) {
      x.rightCols(k) -= (x.rightCols(k) * h) * (2.0 / hh) * h.transpose();
      v.rightCols(k) -= (v.rightCols(k) * h) * (2.0 / hh) * h.transpose();
    }
    x.block(i, p + 1, 1, k - 1).setZero();
    ++p;
  }
  return v;
}

}  // namespace

CanonicalForm cf_check_and_normalize(const SolutionBundle& bundle, const Tolerances& tol) {
  const Matrix& c0 = bundle.transfer[0];
  const int m = bundle.model.m;
  const int rank = numerical_rank(c0, tol.rank);
  if (rank < m) {
    throw Error(ErrorKind::RankDeficientC0,
                "rank(C_0) = " + std::to_string(rank) + " < m = " + std::to_string(m));
  }
  CanonicalForm cf{Matrix::Identity(m, m), is_canonical_lower(c0), bundle, check_invertibility(bundle.ma_part, tol)};
  if (cf.invertibility.status == InvertibilityStatus::NotInvertible) {
    throw Error(ErrorKind::NotInvertible, "[B_-^{-1}A]_+(z) loses rank inside the unit disk");
  }
  if (cf.was_canonical) return cf;

  cf.V = staircase_rotation(c0);
  SolutionBundle& b = cf.bundle;
  b.model = Model(b.model.B, b.model.A.right_multiply(cf.V), b.model.lambda, b.model.kappa);
  b.ma_part = b.ma_part.right_multiply(cf.V);
  b.a_plus = b.a_plus.right_multiply(cf.V);
  for (auto& c : b.transfer.coeffs) c = c * cf.V;
  b.c0_canonical = is_canonical_lower(b.transfer[0]);
  b.c0_rank = rank;
  return cf;
}

}  // namespace ratex
