#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/Polynomials>

#include "ratex/errors.hpp"
#include "ratex/laurent_matrix.hpp"

namespace ratex {

std::vector<Complex> polynomial_zeros(const Vector& ascending) {
  Eigen::Index deg = ascending.size() - 1;
  while (deg > 0 && ascending(deg) == 0.0) --deg;
  if (deg <= 0) return {};
  if (deg == 1) return {Complex(-ascending(0) / ascending(1), 0.0)};
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(Vector(ascending.head(deg + 1)));
  const auto& roots = solver.roots();
  return std::vector<Complex>(roots.data(), roots.data() + roots.size());
}

DeterminantZeros determinant_zeros(const LaurentMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeMismatch, "determinant needs a square matrix");
  const Eigen::Index n = a.rows();
  const int span = a.max_lag() - a.min_lag();
  const int nodes = static_cast<int>(n) * span + 1;

  // det(z^{-min_lag} a(z)) has degree at most n*span: sample it at the roots
  // of unity and invert the DFT.
  const LaurentMatrix shifted(0, a.coeffs());
  std::vector<Complex> values(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * k / nodes);
    values[static_cast<std::size_t>(k)] = shifted.evaluate(w).partialPivLu().determinant();
  }
  Vector poly(nodes);
  for (int j = 0; j < nodes; ++j) {
    Complex acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
      acc += values[static_cast<std::size_t>(k)] *
             std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(j) * k / nodes);
    }
    poly(j) = acc.real() / nodes;
  }

  const double scale = std::pow(std::max(1.0, a.max_abs()), static_cast<double>(n));
  const double peak = poly.cwiseAbs().maxCoeff();
  if (peak <= 1e-13 * scale) {
    throw Error(ErrorKind::IdenticallySingular, "determinant vanishes identically");
  }
  Eigen::Index top = nodes - 1;
  while (top > 0 && std::abs(poly(top)) <= 1e-12 * peak) --top;
  // Coefficients below the interpolation noise floor are exact zeros.
  for (Eigen::Index j = 0; j <= top; ++j) {
    if (std::abs(poly(j)) <= 1e-15 * peak) poly(j) = 0.0;
  }

  DeterminantZeros out;
  out.poly = poly.head(top + 1);
  out.zeros = polynomial_zeros(out.poly);
  return out;
}

}  // namespace ratex
