#include "ratex/param_map.hpp"

#include <cmath>
#include <string>

#include "ratex/errors.hpp"

namespace ratex {

namespace {

LaurentMatrix eval_block(const std::map<int, std::vector<std::vector<ExprPtr>>>& entries, int rows, int cols,
                         int lo, int hi, const Vector& theta) {
  std::vector<Matrix> coeffs(static_cast<std::size_t>(hi - lo + 1), Matrix::Zero(rows, cols));
  for (const auto& [lag, grid] : entries) {
    if (lag < lo || lag > hi) {
      throw Error(ErrorKind::LagBoundMismatch, "lag " + std::to_string(lag) + " outside " + std::to_string(lo) +
                                                   ".." + std::to_string(hi));
    }
    Matrix& c = coeffs[static_cast<std::size_t>(lag - lo)];
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const ExprPtr& e = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (e) c(i, j) = evaluate(*e, theta);
      }
    }
  }
  return LaurentMatrix(lo, std::move(coeffs));
}

}  // namespace

Model eval_model(const ParamMap& map, const Vector& theta, std::vector<std::string>* warnings) {
  if (theta.size() != static_cast<Eigen::Index>(map.params.size())) {
    throw Error(ErrorKind::InvalidArgument, "theta has " + std::to_string(theta.size()) + " entries, expected " +
                                                std::to_string(map.params.size()));
  }
  if (warnings) {
    for (std::size_t k = 0; k < map.domain.size(); ++k) {
      const double t = theta(static_cast<Eigen::Index>(k));
      if (t < map.domain[k].first || t > map.domain[k].second) {
        warnings->push_back(map.params[k] + " = " + std::to_string(t) + " lies outside the domain box");
      }
    }
  }
  LaurentMatrix B = eval_block(map.B, map.n, map.n, -map.lambda, map.kappa, theta);
  LaurentMatrix A = eval_block(map.A, map.n, map.m, 0, map.kappa, theta);
  return Model(std::move(B), std::move(A), map.lambda, map.kappa);
}

std::vector<std::string> coefficient_names(int n, int m, int kappa, int lambda, std::optional<int> equation) {
  auto name = [](char block, int lag, int row, int col) {
    return std::string(1, block) + "[" + std::to_string(lag) + "][" + std::to_string(row + 1) + "][" +
           std::to_string(col + 1) + "]";
  };
  std::vector<std::string> out;
  if (equation) {
    for (int lag = -lambda; lag <= kappa; ++lag) {
      for (int c = 0; c < n; ++c) out.push_back(name('B', lag, *equation, c));
    }
    for (int lag = 0; lag <= kappa; ++lag) {
      for (int c = 0; c < m; ++c) out.push_back(name('A', lag, *equation, c));
    }
    return out;
  }
  // column-major over [B_{-l} .. B_k | A_0 .. A_k]
  for (int lag = -lambda; lag <= kappa; ++lag) {
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r) out.push_back(name('B', lag, r, c));
    }
  }
  for (int lag = 0; lag <= kappa; ++lag) {
    for (int c = 0; c < m; ++c) {
      for (int r = 0; r < n; ++r) out.push_back(name('A', lag, r, c));
    }
  }
  return out;
}

NonlinearRestriction compile_nonlinear(const std::vector<std::string>& expressions, int n, int m, int kappa,
                                       int lambda, std::optional<int> equation) {
  if (expressions.empty()) throw Error(ErrorKind::InvalidRestriction, "no nonlinear restrictions given");
  const auto names = coefficient_names(n, m, kappa, lambda, equation);
  std::vector<ExprPtr> parsed;
  for (const auto& text : expressions) parsed.push_back(parse_expression(text, names));
  NonlinearRestriction r;
  r.equation = equation;
  r.residual = [parsed, width = names.size()](const Vector& x) {
    if (x.size() != static_cast<Eigen::Index>(width)) {
      throw Error(ErrorKind::InvalidRestriction, "restriction evaluated at a point of the wrong size");
    }
    Vector out(static_cast<Eigen::Index>(parsed.size()));
    for (std::size_t k = 0; k < parsed.size(); ++k) out(static_cast<Eigen::Index>(k)) = evaluate(*parsed[k], x);
    return out;
  };
  return r;
}

NonlinearRestriction affine_as_nonlinear(const AffineRestriction& a) {
  NonlinearRestriction r;
  r.equation = a.equation;
  r.residual = [R = a.R, u = a.u](const Vector& x) -> Vector { return R * x - u; };
  return r;
}

const char* to_string(GenericVerdict v) {
  switch (v) {
    case GenericVerdict::GenericallyIdentified: return "generically_identified";
    case GenericVerdict::EvidenceNotIdentified: return "evidence_not_identified";
    case GenericVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

const char* to_string(LocalVerdict v) {
  switch (v) {
    case LocalVerdict::LocallyIdentified: return "locally_identified";
    case LocalVerdict::RankDeficientRegular: return "rank_deficient_regular";
    case LocalVerdict::RankDeficientIrregular: return "rank_deficient_irregular";
  }
  return "rank_deficient_irregular";
}

}  // namespace ratex
