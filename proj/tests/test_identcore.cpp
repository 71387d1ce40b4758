#include <doctest.h>

#include "ratex/ident.hpp"
#include "ratex/linalg.hpp"
#include "test_support.hpp"

using namespace ratex;
using testing::coord_index;
using testing::error_kind;
using testing::pin_coordinates;
using testing::scalar;

namespace {

Model white_noise() { return Model(scalar(0, {1.0}), scalar(0, {1.0}), 1, 1); }

TransferSeries series(std::vector<double> c) {
  TransferSeries s;
  for (double v : c) s.coeffs.push_back(Matrix::Constant(1, 1, v));
  return s;
}

}  // namespace

TEST_CASE("scalar P' (x) I layout") {
  const double c0 = 1.5, c1 = -0.7, c2 = 0.3, c3 = 2.1;
  const IdentSystem sys = build_ident_system(series({c0, c1, c2, c3}), 1, 1, 1, 1);
  Matrix expected(4, 6);
  expected << -c0, 0, 0, 1, 0, 0,
              -c1, -c0, 0, 0, 1, 0,
              -c2, -c1, -c0, 0, 0, 1,
              -c3, -c2, -c1, 0, 0, 0;
  CHECK(kron_identity(sys.P.transpose(), 1) == expected);
  REQUIRE(sys.H.rows() == 3);
  REQUIRE(sys.H.cols() == 1);
  CHECK(sys.H(2, 0) == c1);  // bottom-left block
  CHECK(sys.H(0, 0) == c3);  // top-right block
}

TEST_CASE("block layout of T and H for a matrix series") {
  std::mt19937_64 rng(79);
  const int n = 2, m = 1, kappa = 1, lambda = 1;
  TransferSeries c;
  for (int j = 0; j <= (n + 1) * kappa + lambda; ++j) c.coeffs.push_back(testing::random_matrix(rng, n, m));
  const IdentSystem sys = build_ident_system(c, n, m, kappa, lambda);
  const int w = kappa + lambda + 1;
  CHECK(sys.T.rows() == n * w);
  CHECK(sys.T.cols() == m * w);
  CHECK(sys.H.cols() == n * m * kappa);
  CHECK(sys.P.rows() == (n + m) * w);
  CHECK(sys.P.cols() == m * (1 + (n + 1) * kappa + lambda));
  for (int r = 0; r < w; ++r) {
    for (int col = 0; col < w; ++col) {
      const Matrix expected = col >= r ? c[col - r] : Matrix(Matrix::Zero(n, m));
      CHECK(sys.T.block(r * n, col * m, n, m) == expected);
    }
    for (int col = 0; col < n * kappa; ++col) CHECK(sys.H.block(r * n, col * m, n, m) == c[w - r + col]);
  }
  CHECK(sys.H.block((w - 1) * n, 0, n, m) == c[1]);
  CHECK(sys.H.block(0, (n * kappa - 1) * m, n, m) == c[(n + 1) * kappa + lambda]);
}

TEST_CASE("short series is rejected") {
  CHECK(error_kind([] { build_ident_system(series({1.0, 0.0}), 1, 1, 1, 1); }) == ErrorKind::InsufficientHorizon);
}

TEST_CASE("white noise has a zero Hankel block and a three-dimensional class") {
  const IdentSystem sys = build_ident_system(solve_model(white_noise()));
  CHECK(sys.H.isZero());
  CHECK(sys.hankel_rank == 0);
  CHECK(equivalence_class_dim(sys) == 3);
  CHECK(equivalence_class_dim_from_kernel(sys) == 3);
}

TEST_CASE("generic scalar two-sided model has a two-dimensional class") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rm = testing::random_valid_model(rng, 1, 1, 1, 1);
    const IdentSystem sys = build_ident_system(solve_model(rm.model));
    CHECK(equivalence_class_dim(sys) == 2);
  }
}

TEST_CASE("generic VARMA has an n^2-dimensional class") {
  std::mt19937_64 rng(89);
  for (int n = 1; n <= 3; ++n) {
    const IdentSystem sys = build_ident_system(solve_model(testing::random_varma(rng, n, n, 1)));
    CHECK(sys.hankel_rank == n);
    CHECK(equivalence_class_dim(sys) == n * n);
  }
}

TEST_CASE("rank of P and the two dimension routes agree") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 2, m = 1 + (trial / 2) % 2, kappa = trial % 3, lambda = (trial / 3) % 3;
    const auto rm = testing::random_valid_model(rng, n, m, kappa, lambda);
    const IdentSystem sys = build_ident_system(solve_model(rm.model));
    CHECK(numerical_rank(sys.P, 1e-10) == m * (kappa + lambda + 1) + sys.hankel_rank);
    CHECK(equivalence_class_dim(sys) == equivalence_class_dim_from_kernel(sys));
    CHECK(sys.hankel_rank <= n * kappa);
    CHECK(sys.mcmillan_delta == sys.hankel_rank);
  }
}

TEST_CASE("kernel vectors of the equivalent scalar examples") {
  const SolutionBundle a = solve_model(white_noise());
  const SolutionBundle ma = solve_model(Model(scalar(0, {1.0, 0.5}), scalar(0, {1.0, 0.5}), 1, 1));
  const SolutionBundle two = solve_model(Model(scalar(-1, {1.0 / 3.0, 1.0, 0.5}), scalar(0, {1.0, 0.5}), 1, 1));
  Vector v1(6), v2(6);
  v1 << 0, 1, 0.5, 0, 1, 0.5;
  v2 << 1.0 / 3.0, 1, 0.5, 1.0 / 3.0, 1, 0.5;
  CHECK((vec(coefficient_block(ma.model.B, -1, ma.a_plus, -1, 1)) - v1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((vec(coefficient_block(two.model.B, -1, two.a_plus, -1, 1)) - v2).cwiseAbs().maxCoeff() < 1e-12);
  const IdentSystem sys = build_ident_system(a);
  const Matrix K = kron_identity(sys.P.transpose(), 1);
  CHECK((K * v1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((K * v2).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(obs_equivalent(a, ma.model).equivalent);
  CHECK(obs_equivalent(a, two.model).equivalent);
  const EquivalenceResult no = obs_equivalent(a, Model(scalar(0, {1.0}), scalar(0, {1.0, 0.5}), 1, 1));
  CHECK_FALSE(no.equivalent);
  CHECK(no.residual > 0.1);
}

TEST_CASE("kernel criterion agrees with the spectral oracle on random pairs") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rm = testing::random_valid_model(rng, 2, 1, 1, 0);
    const Model base(rm.model.B, rm.model.A, 1, 1);
    const SolutionBundle a = solve_model(base);
    // Premultiplying by a valid left factor G keeps C when A becomes
    // [G A]_+; a perturbation of A breaks equivalence.
    const LaurentMatrix g(-1, {testing::random_matrix(rng, 2, 2, 0.3), Matrix::Identity(2, 2)});
    const Model eq(g * base.B, (g * base.A).positive_part(), 1, 1);
    const SolutionBundle eqb = solve_model(eq);
    CHECK(obs_equivalent(a, eq).equivalent);
    CHECK(spectral_equivalent(a, eqb).equivalent);
    const Model other(base.B, base.A + LaurentMatrix::constant(testing::random_matrix(rng, 2, 1, 0.2)), 1, 1);
    CHECK_FALSE(obs_equivalent(a, other).equivalent);
    CHECK_FALSE(spectral_equivalent(a, solve_model(other)).equivalent);
  }
}

TEST_CASE("small steps along the kernel stay in the equivalence class") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rm = testing::random_valid_model(rng, 1, 1, 1, 1);
    const SolutionBundle a = solve_model(rm.model);
    const IdentSystem sys = build_ident_system(a);
    const Matrix N = null_space(kron_identity(sys.P.transpose(), 1), 1e-10);
    REQUIRE(N.cols() == equivalence_class_dim(sys));
    Vector xi = N * testing::random_matrix(rng, N.cols(), 1);
    xi /= xi.cwiseAbs().maxCoeff();
    const Vector zeta = vec(coefficient_block(a.model.B, -1, a.a_plus, -1, 1)) + 1e-2 * xi;
    const Model b(scalar(-1, {zeta(0), zeta(1), zeta(2)}), scalar(0, {zeta(4), zeta(5)}), 1, 1);
    REQUIRE(check_eu(b.B).holds);
    const SolutionBundle bb = solve_model(b);
    CHECK(std::abs(bb.a_plus.coeff(-1)(0, 0) - zeta(3)) < 1e-10);
    CHECK(obs_equivalent(a, b).equivalent);
    CHECK(spectral_equivalent(a, bb).equivalent);
  }
}

TEST_CASE("lag-bound mismatch between compared models") {
  const SolutionBundle a = solve_model(white_noise());
  // Narrower declared bounds embed; coefficients beyond a's bounds do not.
  CHECK(obs_equivalent(a, Model(scalar(0, {1.0}), scalar(0, {1.0}), 0, 1)).equivalent);
  CHECK(error_kind([&] { obs_equivalent(a, Model(scalar(0, {1.0, 0.5, 0.1}), scalar(0, {1.0}), 0, 2)); }) ==
        ErrorKind::LagBoundMismatch);
}

TEST_CASE("pinning B_{-1} and A_0 in the scalar model: det M = C0 C1") {
  std::mt19937_64 rng(107);
  const std::vector<int> pins{coord_index(1, 1, 1, 1, true, -1, 0, 0), coord_index(1, 1, 1, 1, false, 0, 0, 0)};
  for (int trial = 0; trial < 20; ++trial) {
    const auto rm = testing::random_valid_model(rng, 1, 1, 1, 1);
    const SolutionBundle s = solve_model(rm.model);
    const IdentSystem sys = build_ident_system(s);
    const AffineRestriction r = pin_coordinates(rm.model, pins);
    const Matrix M = ident_matrix(sys, r.R);
    REQUIRE(M.rows() == 6);
    REQUIRE(M.cols() == 6);
    const double c0c1 = s.transfer[0](0, 0) * s.transfer[1](0, 0);
    CHECK(std::abs(std::abs(M.determinant()) - std::abs(c0c1)) < 1e-10);
    CHECK(ident_test_affine(sys, r, rm.model).identified);
  }
  const IdentSystem wn = build_ident_system(solve_model(white_noise()));
  const RankReport rep = ident_test_affine(wn, pin_coordinates(white_noise(), pins), white_noise());
  CHECK_FALSE(rep.identified);
  CHECK(rep.required_rank == 6);
  CHECK(rep.numerical_rank == 5);
}

TEST_CASE("a fully pinned static model is identified") {
  Matrix b(2, 2), a(2, 1);
  b << 1.0, 0.3, -0.2, 1.0;
  a << 0.5, 1.0;
  const Model sem(LaurentMatrix::constant(b), LaurentMatrix::constant(a), 0, 0);
  const IdentSystem sys = build_ident_system(solve_model(sem));
  AffineRestriction r;
  r.R = Matrix::Identity(6, 6);
  r.u = restriction_coordinates(sem);
  const RankReport rep = ident_test_affine(sys, r, sem);
  CHECK(rep.identified);
  CHECK(rep.required_rank == 6);
}

TEST_CASE("scalar system and equation matrices coincide") {
  std::mt19937_64 rng(109);
  const auto rm = testing::random_valid_model(rng, 1, 1, 1, 1);
  const IdentSystem sys = build_ident_system(solve_model(rm.model));
  const Matrix R = testing::random_matrix(rng, 2, 5);
  CHECK(ident_matrix(sys, R) == ident_matrix_equation(sys, R));
  AffineRestriction sr{R, R * restriction_coordinates(rm.model), std::nullopt};
  AffineRestriction er{R, sr.u, 0};
  CHECK(ident_test_affine(sys, sr, rm.model).identified == ident_test_equation(sys, er, rm.model).identified);
}

TEST_CASE("identified equations imply an identified system") {
  std::mt19937_64 rng(113);
  int all_identified = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2, m = 1, kappa = 1, lambda = trial % 2;
    const auto rm = testing::random_valid_model(rng, n, m, kappa, lambda);
    const IdentSystem sys = build_ident_system(solve_model(rm.model));
    const int width = static_cast<int>(restriction_width(n, m, kappa, lambda, true));
    const int sys_width = static_cast<int>(restriction_width(n, m, kappa, lambda, false));
    std::vector<int> sys_pins;
    bool every = true;
    for (int i = 0; i < n; ++i) {
      std::vector<int> coords(static_cast<std::size_t>(width));
      std::iota(coords.begin(), coords.end(), 0);
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(2 + trial % 3);
      const AffineRestriction ri = pin_coordinates(rm.model, coords, i);
      if (ri.u.isZero()) {
        every = false;
        continue;
      }
      every = every && ident_test_equation(sys, ri, rm.model).identified;
      for (int c : coords) sys_pins.push_back(c * n + i);
    }
    const AffineRestriction r = pin_coordinates(rm.model, sys_pins);
    REQUIRE(r.R.cols() == sys_width);
    if (every) {
      ++all_identified;
      CHECK(ident_test_affine(sys, r, rm.model).identified);
    }
  }
  CHECK(all_identified >= 5);
}

TEST_CASE("zero right-hand side is rejected") {
  const IdentSystem sys = build_ident_system(solve_model(white_noise()));
  AffineRestriction r{Matrix::Zero(1, 5), Vector::Zero(1), std::nullopt};
  r.R(0, 0) = 1.0;
  CHECK(error_kind([&] { ident_test_affine(sys, r, white_noise()); }) == ErrorKind::InvalidRestriction);
  AffineRestriction wrong{Matrix::Identity(1, 3), Vector::Ones(1), std::nullopt};
  CHECK(error_kind([&] { ident_test_affine(sys, wrong, white_noise()); }) == ErrorKind::InvalidRestriction);
}

TEST_CASE("unsatisfied restrictions still run with a warning") {
  const IdentSystem sys = build_ident_system(solve_model(white_noise()));
  AffineRestriction r = pin_coordinates(white_noise(), {1});
  r.u(0) = 2.0;
  const RankReport rep = ident_test_affine(sys, r, white_noise());
  CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("structural-coefficient criterion on scalar VARMA examples") {
  // AR(1) with B_0 and A_0 pinned: only the scale freedom exists, so pinned.
  const Model ar(scalar(0, {1.0, -0.5}), scalar(0, {1.0}), 0, 1);
  const AffineRestriction rar = pin_coordinates(ar, {coord_index(1, 1, 1, 0, true, 0, 0, 0),
                                                     coord_index(1, 1, 1, 0, false, 0, 0, 0)});
  const IdentSystem sar = build_ident_system(solve_model(ar));
  CHECK(ds_criterion(ar, rar).identified);
  CHECK(ident_test_affine(sar, rar, ar).identified);

  // MA(1) with B_0 pinned: the class is the scale line, removed by the pin.
  const Model ma(scalar(0, {1.0}), scalar(0, {1.0, 0.5}), 0, 1);
  const AffineRestriction rma = pin_coordinates(ma, {coord_index(1, 1, 1, 0, true, 0, 0, 0)});
  const IdentSystem sma = build_ident_system(solve_model(ma));
  CHECK(ds_criterion(ma, rma).identified);
  CHECK(ident_test_affine(sma, rma, ma).identified);

  // White noise at kappa = 1 with B_0 pinned: a common factor 1 + c z is free.
  const Model wn(scalar(0, {1.0}), scalar(0, {1.0}), 0, 1);
  const AffineRestriction rwn = pin_coordinates(wn, {coord_index(1, 1, 1, 0, true, 0, 0, 0)});
  const IdentSystem swn = build_ident_system(solve_model(wn));
  CHECK_FALSE(ds_criterion(wn, rwn).identified);
  CHECK_FALSE(ident_test_affine(swn, rwn, wn).identified);
}

TEST_CASE("structural-coefficient criterion requires lambda = 0") {
  const AffineRestriction r = pin_coordinates(white_noise(), {1});
  CHECK(error_kind([&] { ds_criterion(white_noise(), r); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("structural-coefficient and impulse-response criteria agree on random VARMA") {
  std::mt19937_64 rng(127);
  int identified = 0, not_identified = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2, m = 1 + trial % 2, kappa = 1;
    const Model vm = testing::random_varma(rng, n, m, kappa);
    const int width = static_cast<int>(restriction_width(n, m, kappa, 0, false));
    std::vector<int> coords(static_cast<std::size_t>(width));
    std::iota(coords.begin(), coords.end(), 0);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(static_cast<std::size_t>(2 + trial % 5));
    coords.push_back(0);  // B_0(1,1) keeps u nonzero
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    const AffineRestriction r = pin_coordinates(vm, coords);
    const bool ds = ds_criterion(vm, r).identified;
    const bool affine = ident_test_affine(build_ident_system(solve_model(vm)), r, vm).identified;
    CHECK(ds == affine);
    (affine ? identified : not_identified)++;
  }
  CHECK(identified > 0);
  CHECK(not_identified > 0);
}

TEST_CASE("rank report fields") {
  Matrix M = Matrix::Zero(3, 2);
  M(0, 0) = 1.0;
  M(1, 1) = 1e-3;
  const RankReport r = rank_report(M, 2, 1e-10);
  CHECK(r.identified);
  CHECK(r.numerical_rank == 2);
  CHECK(r.gap_ratio == doctest::Approx(1e-3));
  CHECK(r.threshold == doctest::Approx(3e-10));
  CHECK_FALSE(r.borderline);
  M(1, 1) = 1e-9;
  const RankReport b = rank_report(M, 2, 1e-10);
  CHECK(b.borderline);
}
