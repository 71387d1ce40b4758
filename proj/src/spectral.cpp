#include <cmath>
#include <numbers>
#include <string>

#include "ratex/errors.hpp"
#include "ratex/solution.hpp"

namespace ratex {

std::vector<Complex> unit_circle_grid(int points) {
  if (points < 1) throw Error(ErrorKind::InvalidArgument, "grid needs at least one point");
  std::vector<Complex> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / points));
  return grid;
}

std::vector<CMatrix> spectral_density(const LaurentMatrix& B, const LaurentMatrix& a_plus,
                                      const std::vector<Complex>& grid) {
  if (B.rows() != B.cols() || a_plus.rows() != B.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "spectral_density: B must be square and match A^+");
  }
  std::vector<CMatrix> out;
  out.reserve(grid.size());
  for (const Complex& z : grid) {
    Eigen::FullPivLU<CMatrix> lu(B.evaluate(z));
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
      throw Error(ErrorKind::SingularOnGrid,
                  "B(z) is singular at z = " + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                      std::to_string(z.imag()) + "i");
    }
    const CMatrix k = lu.solve(a_plus.evaluate(z));
    out.push_back(k * k.adjoint());
  }
  return out;
}

std::vector<Matrix> autocovariances(const TransferSeries& c, int max_lag) {
  std::vector<Matrix> gamma;
  const int h = c.horizon();
  for (int k = 0; k <= max_lag; ++k) {
    Matrix g = Matrix::Zero(c[0].rows(), c[0].rows());
    for (int j = 0; j + k <= h; ++j) g.noalias() += c[j + k] * c[j].transpose();
    gamma.push_back(std::move(g));
  }
  return gamma;
}

}  // namespace ratex
