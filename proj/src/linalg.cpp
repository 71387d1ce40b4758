#include "ratex/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "ratex/errors.hpp"
#include "ratex/tolerances.hpp"

namespace ratex {

Tolerances Tolerances::from_environment() {
  Tolerances t;
  if (const char* env = std::getenv("RATEX_TOL_RANK"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, std::string("RATEX_TOL_RANK is not a positive number: ") + env);
    }
    t.rank = v;
  }
  return t;
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

int numerical_rank(const Vector& sv, Eigen::Index rows, Eigen::Index cols, double tol_rank) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold = tol_rank * sv(0) * static_cast<double>(std::max(rows, cols));
  int r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) r += sv(k) > threshold ? 1 : 0;
  return r;
}

int numerical_rank(const Matrix& m, double tol_rank) {
  return numerical_rank(singular_values(m), m.rows(), m.cols(), tol_rank);
}

Matrix kron_identity(const Matrix& m, Eigen::Index n) {
  Matrix out = Matrix::Zero(m.rows() * n, m.cols() * n);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out.block(i * n, j * n, n, n).diagonal().setConstant(m(i, j));
    }
  }
  return out;
}

Matrix null_space(const Matrix& m, double tol_rank) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const int r = numerical_rank(svd.singularValues(), m.rows(), m.cols(), tol_rank);
  return svd.matrixV().rightCols(m.cols() - r);
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix hconcat(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) return Matrix();
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Matrix out(blocks.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

}  // namespace ratex
