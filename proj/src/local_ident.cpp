#include <cmath>
#include <random>
#include <string>

#include "ratex/errors.hpp"
#include "ratex/linalg.hpp"
#include "ratex/param_map.hpp"

namespace ratex {

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, const FdConfig& config) {
  auto call = [&](const Vector& at) {
    Vector y;
    try {
      y = f(at);
    } catch (const Error& e) {
      throw Error(ErrorKind::Jacobian, std::string("evaluation failed at a stencil point: ") + e.what());
    }
    if (!y.allFinite()) throw Error(ErrorKind::Jacobian, "non-finite value at a stencil point");
    return y;
  };
  const Vector y0 = call(x);
  Matrix J(y0.size(), x.size());
  Vector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = config.step_scale * std::max(1.0, std::abs(x(j)));
    xp(j) = x(j) + h;
    const Vector up = call(xp);
    xp(j) = x(j) - h;
    const Vector down = call(xp);
    xp(j) = x(j);
    J.col(j) = (up - down) / (2.0 * h);
  }
  return J;
}

namespace {

// Inverse of restriction_coordinates: rebuild (B, A) from the coordinates,
// with `base` supplying the rows not covered in equation mode.
Model model_from_coordinates(const Model& base, const Vector& x, std::optional<int> equation) {
  const int n = base.n, m = base.m, w = base.kappa + base.lambda + 1;
  Matrix X = coefficient_block(base.B, -base.lambda, base.A, 0, base.kappa);
  if (equation) {
    X.row(*equation) = x.transpose();
  } else {
    X = Eigen::Map<const Matrix>(x.data(), n, n * w + m * (base.kappa + 1));
  }
  std::vector<Matrix> b, a;
  for (int k = 0; k < w; ++k) b.push_back(X.middleCols(k * n, n));
  for (int k = 0; k <= base.kappa; ++k) a.push_back(X.middleCols(n * w + k * m, m));
  return Model(LaurentMatrix(-base.lambda, std::move(b)), LaurentMatrix(0, std::move(a)), base.lambda, base.kappa);
}

struct LocalMatrix {
  Matrix M;
  Matrix J;
  int required = 0;
};

LocalMatrix local_matrix(const Model& model, const NonlinearRestriction& r, const Tolerances& tol,
                         const FdConfig& fd) {
  const SolutionBundle bundle = solve_model(model, 0, tol);
  const IdentSystem sys = build_ident_system(bundle, tol.rank);
  const Vector x = restriction_coordinates(model, r.equation);
  LocalMatrix out;
  out.J = fd_jacobian(r.residual, x, fd);
  const int w = model.kappa + model.lambda + 1;
  if (r.equation) {
    out.M = ident_matrix_equation(sys, out.J);
    out.required = (model.n + model.m) * w;
  } else {
    out.M = ident_matrix(sys, out.J);
    out.required = model.n * (model.n + model.m) * w;
  }
  return out;
}

}  // namespace

LocalReport local_ident(const Model& model, const NonlinearRestriction& r, const Tolerances& tol, const FdConfig& fd,
                        std::uint64_t probe_seed) {
  if (!r.residual) throw Error(ErrorKind::InvalidRestriction, "restriction map is empty");
  const Vector x = restriction_coordinates(model, r.equation);
  Vector value;
  try {
    value = r.residual(x);
  } catch (const Error& e) {
    throw Error(ErrorKind::Jacobian, std::string("restriction evaluation failed: ") + e.what());
  }
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  if (value.size() == 0) throw Error(ErrorKind::InvalidRestriction, "restriction map has no outputs");
  if (!value.allFinite() || value.cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error(ErrorKind::InvalidRestriction, "the point does not satisfy the restrictions (max |R| = " +
                                                   std::to_string(value.cwiseAbs().maxCoeff()) + ")");
  }

  const LocalMatrix lm = local_matrix(model, r, tol, fd);
  LocalReport rep;
  rep.jacobian = lm.J;
  rep.rank = rank_report(lm.M, lm.required, tol.rank);
  if (rep.rank.identified) {
    rep.verdict = LocalVerdict::LocallyIdentified;
    rep.notes.push_back("full column rank: the point is locally identified");
    return rep;
  }

  // Rank at nearby points; constant rank is the regularity condition under
  // which deficiency implies non-identification.
  std::mt19937_64 rng(probe_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double radius = 1e-3 * scale;
  bool constant = true;
  for (int probe = 0; probe < 4; ++probe) {
    Vector dir(x.size());
    for (Eigen::Index k = 0; k < dir.size(); ++k) dir(k) = normal(rng);
    const Vector xp = x + radius * dir / dir.norm();
    try {
      const Model near = model_from_coordinates(model, xp, r.equation);
      const LocalMatrix pm = local_matrix(near, r, tol, fd);
      const int rank = numerical_rank(pm.M, tol.rank);
      rep.probe_ranks.push_back(rank);
      constant = constant && rank == rep.rank.numerical_rank;
    } catch (const Error&) {
      rep.probe_ranks.push_back(-1);
      constant = false;
    }
  }
  rep.verdict = constant ? LocalVerdict::RankDeficientRegular : LocalVerdict::RankDeficientIrregular;
  rep.notes.push_back("not full rank: this indicates non-identification only under the constant-rank (regularity) "
                      "condition near the point");
  rep.notes.push_back(constant ? "rank appears locally constant at the probed nearby points"
                               : "rank changes at nearby points: the regularity condition appears to fail, so no "
                                 "conclusion about identification is drawn");
  return rep;
}

}  // namespace ratex
