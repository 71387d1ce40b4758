#include "ratex/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <lapacke.h>

namespace ratex {

namespace {

struct Spectrum {
  std::optional<ErrorKind> failure;
  std::string message;
  std::vector<Complex> zeros;
  int inside = 0;
  int required = 0;
  // Orthonormal basis of the deflating subspace of the inside eigenvalues,
  // and the pencil restricted to it (A Z1 = E Z1 J).
  Matrix z1;
  Matrix j;
};

enum class Side { Inside, Outside, Band, Singular };

// Companion pencil of Q(z) = (z^lambda B(z))^T: A v = z E v with
// v = [x; z x; ...; z^{d-1} x].
Spectrum split_spectrum(const LaurentMatrix& B, int lambda, const Tolerances& tol) {
  Spectrum out;
  const Eigen::Index n = B.rows();
  out.required = static_cast<int>(n) * lambda;

  try {
    (void)determinant_zeros(B);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IdenticallySingular) throw;
    out.failure = ErrorKind::ZerosOnUnitCircle;
    out.message = "determinant identically zero";
    return out;
  }

  const int d = lambda + B.max_lag();
  if (d == 0) {
    if (out.required > 0) {
      out.failure = ErrorKind::WrongStableCount;
      out.message = "0 zeros inside the unit circle, " + std::to_string(out.required) + " required";
    }
    return out;
  }
  const Eigen::Index N = n * d;
  Matrix A = Matrix::Zero(N, N);
  Matrix E = Matrix::Identity(N, N);
  for (int i = 0; i + 1 < d; ++i) A.block(i * n, (i + 1) * n, n, n).setIdentity();
  for (int jdx = 0; jdx < d; ++jdx) {
    A.block((d - 1) * n, jdx * n, n, n) = -B.coeff(jdx - lambda).transpose();
  }
  E.block((d - 1) * n, (d - 1) * n, n, n) = B.coeff(d - lambda).transpose();

  const auto ld = static_cast<lapack_int>(N);
  lapack_int sdim = 0;
  Vector alphar(N), alphai(N), beta(N);
  Matrix Q(N, N), Z(N, N);
  lapack_int info = LAPACKE_dgges(LAPACK_COL_MAJOR, 'V', 'V', 'N', nullptr, ld, A.data(), ld, E.data(), ld,
                                  &sdim, alphar.data(), alphai.data(), beta.data(), Q.data(), ld, Z.data(), ld);
  if (info != 0) {
    out.failure = ErrorKind::DivisorExtractionSingular;
    out.message = "generalized Schur decomposition failed (info " + std::to_string(info) + ")";
    return out;
  }

  const double anorm = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double enorm = std::max(1.0, E.cwiseAbs().maxCoeff());
  std::vector<lapack_logical> select(static_cast<std::size_t>(N), 0);
  std::vector<Complex> inside_zeros, outside_zeros;
  bool band = false;
  bool singular = false;
  for (Eigen::Index k = 0; k < N; ++k) {
    const double amod = std::hypot(alphar(k), alphai(k));
    const double bmod = std::abs(beta(k));
    Side side;
    if (amod <= 1e-13 * anorm * N && bmod <= 1e-13 * enorm * N) {
      side = Side::Singular;
    } else if (amod < (1.0 - tol.boundary) * bmod) {
      side = Side::Inside;
    } else if (amod > (1.0 + tol.boundary) * bmod) {
      side = Side::Outside;
    } else {
      side = Side::Band;
    }
    if (side == Side::Singular) {
      singular = true;
      continue;
    }
    if (side == Side::Band) band = true;
    if (side == Side::Inside) select[static_cast<std::size_t>(k)] = 1;
    if (bmod > 0.0) {
      const Complex mu(alphar(k) / beta(k), alphai(k) / beta(k));
      (side == Side::Inside ? inside_zeros : outside_zeros).push_back(mu);
    }
  }
  out.inside = static_cast<int>(inside_zeros.size());
  out.zeros = inside_zeros;
  out.zeros.insert(out.zeros.end(), outside_zeros.begin(), outside_zeros.end());

  if (singular) {
    out.failure = ErrorKind::ZerosOnUnitCircle;
    out.message = "determinant identically zero";
    return out;
  }
  if (band) {
    out.failure = ErrorKind::ZerosOnUnitCircle;
    out.message = "zeros on unit circle";
    return out;
  }
  if (out.inside != out.required) {
    out.failure = ErrorKind::WrongStableCount;
    out.message = std::to_string(out.inside) + " zeros inside the unit circle, " +
                  std::to_string(out.required) + " required";
    return out;
  }
  if (out.required == 0) return out;

  lapack_int msel = 0;
  double pl = 0.0, pr = 0.0, dif[2] = {0.0, 0.0};
  // The high-level LAPACKE wrapper mis-sizes iwork for ijob = 0, so supply
  // workspace directly.
  std::vector<double> work(static_cast<std::size_t>(4 * N + 16));
  std::vector<lapack_int> iwork(static_cast<std::size_t>(N + 6));
  info = LAPACKE_dtgsen_work(LAPACK_COL_MAJOR, 0, 1, 1, select.data(), ld, A.data(), ld, E.data(), ld,
                             alphar.data(), alphai.data(), beta.data(), Q.data(), ld, Z.data(), ld, &msel, &pl,
                             &pr, dif, work.data(), static_cast<lapack_int>(work.size()), iwork.data(),
                             static_cast<lapack_int>(iwork.size()));
  if (info != 0 || msel != out.required) {
    out.failure = ErrorKind::DivisorExtractionSingular;
    out.message = "reordering of the generalized Schur form failed";
    return out;
  }
  const Eigen::Index k = out.required;
  out.z1 = Z.leftCols(k);
  out.j = E.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(A.topLeftCorner(k, k));
  return out;
}

int effective_lambda(const LaurentMatrix& B) { return B.is_zero() ? 0 : std::max(0, -B.min_lag()); }

}  // namespace

WHFactors wh_factorize(const LaurentMatrix& B, const Tolerances& tol) {
  if (B.rows() != B.cols()) throw Error(ErrorKind::ShapeMismatch, "B must be square");
  const Eigen::Index n = B.rows();
  const int lambda = effective_lambda(B);
  const Spectrum s = split_spectrum(B, lambda, tol);
  if (s.failure) throw Error(*s.failure, s.message);

  WHFactors f{LaurentMatrix::identity(n), B, 0.0, lambda, s.zeros, s.inside};
  if (lambda == 0) return f;

  const Eigen::Index k = n * lambda;
  const int d = lambda + B.max_lag();
  const Matrix w_top = s.z1.topRows(k);
  Matrix w_next;
  if (d > lambda) {
    w_next = s.z1.middleRows(k, n);
  } else {
    w_next = s.z1.middleRows(k - n, n) * s.j;
  }
  Eigen::JacobiSVD<Matrix> svd(w_top);
  const auto& sv = svd.singularValues();
  if (sv(k - 1) < 1e-13 * std::max(1.0, sv(0))) {
    throw Error(ErrorKind::DivisorExtractionSingular, "deflating subspace block is numerically singular");
  }
  // [M_0 ... M_{lambda-1}] W_top = -X J^lambda
  const Matrix mcoef = -w_top.transpose().partialPivLu().solve(w_next.transpose()).transpose();

  std::vector<Matrix> bm(static_cast<std::size_t>(lambda) + 1);
  for (int i = 1; i <= lambda; ++i) {
    bm[static_cast<std::size_t>(lambda - i)] = mcoef.middleCols((lambda - i) * n, n).transpose();
  }
  bm[static_cast<std::size_t>(lambda)] = Matrix::Identity(n, n);
  f.b_minus = LaurentMatrix(-lambda, std::move(bm));

  const int kappa = std::max(0, B.max_lag());
  const auto finv = inverse_series(f.b_minus, kappa + lambda, SeriesDirection::Negative);
  std::vector<Matrix> bp;
  for (int lag = 0; lag <= kappa; ++lag) {
    Matrix c = Matrix::Zero(n, n);
    for (int i = 0; lag + i <= kappa; ++i) c.noalias() += finv[static_cast<std::size_t>(i)] * B.coeff(lag + i);
    bp.push_back(std::move(c));
  }
  f.b_plus = LaurentMatrix(0, std::move(bp));
  f.residual = max_abs_difference(B, f.b_minus * f.b_plus);
  if (f.residual > tol.reconstruction * std::max(1.0, B.max_abs())) {
    throw Error(ErrorKind::DivisorExtractionSingular,
                "reconstruction residual " + std::to_string(f.residual) + " exceeds tolerance");
  }
  return f;
}

EUDiagnostic check_eu(const LaurentMatrix& B, const Tolerances& tol) {
  EUDiagnostic d;
  if (B.rows() != B.cols()) {
    d.failure = ErrorKind::ShapeMismatch;
    d.message = "B must be square";
    return d;
  }
  const int lambda = effective_lambda(B);
  d.required_stable = static_cast<int>(B.rows()) * lambda;
  try {
    const WHFactors f = wh_factorize(B, tol);
    d.holds = true;
    d.zeros = f.zeros;
    d.stable_count = f.stable_count;
  } catch (const Error& e) {
    d.failure = e.kind();
    d.message = e.what();
    try {
      const Spectrum s = split_spectrum(B, lambda, tol);
      d.zeros = s.zeros;
      d.stable_count = s.inside;
    } catch (const Error&) {
    }
  }
  return d;
}

}  // namespace ratex
