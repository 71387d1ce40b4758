#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ratex/expr.hpp"
#include "ratex/ident.hpp"

namespace ratex {

/// theta -> (B(theta), A(theta)). Entries not listed are zero.
struct ParamMap {
  std::vector<std::string> params;
  std::vector<std::pair<double, double>> domain;
  int n = 0;
  int m = 0;
  int lambda = 0;
  int kappa = 0;
  /// lag -> row-major grid of entries.
  std::map<int, std::vector<std::vector<ExprPtr>>> B;
  std::map<int, std::vector<std::vector<ExprPtr>>> A;
};

/// Numeric model at theta. A theta outside the domain box only adds a
/// warning; a vanishing denominator throws Evaluation.
Model eval_model(const ParamMap& map, const Vector& theta, std::vector<std::string>* warnings = nullptr);

/// Names of the restriction coordinates in vec order, e.g. "B[-1][1][1]"
/// (lag, then 1-based row and column). With `equation` only that row.
std::vector<std::string> coefficient_names(int n, int m, int kappa, int lambda,
                                           std::optional<int> equation = std::nullopt);

/// Restriction map R(x) over the coordinates of restriction_coordinates.
struct NonlinearRestriction {
  std::function<Vector(const Vector&)> residual;
  std::optional<int> equation;
};

/// Compiles expression strings over coefficient_names into a residual map.
NonlinearRestriction compile_nonlinear(const std::vector<std::string>& expressions, int n, int m, int kappa,
                                       int lambda, std::optional<int> equation = std::nullopt);

/// The affine map x -> R x - u.
NonlinearRestriction affine_as_nonlinear(const AffineRestriction& r);

struct SamplerConfig {
  int num_samples = 64;
  std::uint64_t seed = 1;
  int min_valid = 16;
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend
  /// on this value.
  int threads = 1;
};

/// Outcome at one parameter point.
struct PointResult {
  Vector theta;
  bool valid = false;
  /// Why the point was rejected (EU, CF or evaluation failure).
  std::string reason;
  std::optional<RankReport> report;
};

PointResult evaluate_point(const ParamMap& map, const AffineRestriction& r, const Vector& theta,
                           const Tolerances& tol = {});

enum class GenericVerdict { GenericallyIdentified, EvidenceNotIdentified, Inconclusive };

const char* to_string(GenericVerdict v);

struct GenericReport {
  int samples_drawn = 0;
  int samples_valid = 0;
  bool full_rank_found = false;
  std::optional<PointResult> witness;
  int deficient_count = 0;
  int borderline_count = 0;
  GenericVerdict verdict = GenericVerdict::Inconclusive;
  std::vector<std::string> notes;
};

/// Uniform draws from the domain box; stops at the lowest-index full-rank
/// witness.
GenericReport generic_ident(const ParamMap& map, const AffineRestriction& r, const SamplerConfig& config = {},
                            const Tolerances& tol = {});

struct FdConfig {
  /// Step h_j = step_scale * max(1, |x_j|).
  double step_scale = 6.0554544523933395e-06;  // cbrt(DBL_EPSILON)
};

/// Central-difference Jacobian. Throws Jacobian when f fails or returns
/// non-finite values at a stencil point.
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, const FdConfig& config = {});

enum class LocalVerdict { LocallyIdentified, RankDeficientRegular, RankDeficientIrregular };

const char* to_string(LocalVerdict v);

struct LocalReport {
  RankReport rank;
  LocalVerdict verdict = LocalVerdict::LocallyIdentified;
  Matrix jacobian;
  /// Ranks of M at perturbed nearby points (only when rank-deficient).
  std::vector<int> probe_ranks;
  std::vector<std::string> notes;
};

/// Full rank of [P' (x) I_n; grad R_bar] (or [P'; grad R_bar_i]). Throws
/// InvalidRestriction when R is not close to zero at the point.
LocalReport local_ident(const Model& model, const NonlinearRestriction& r, const Tolerances& tol = {},
                        const FdConfig& fd = {}, std::uint64_t probe_seed = 7);

}  // namespace ratex
