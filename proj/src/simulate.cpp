#include <algorithm>
#include <random>

#include "ratex/errors.hpp"
#include "ratex/solution.hpp"

namespace ratex {

namespace {

constexpr int kTruncationCap = 10000;

}  // namespace

int default_truncation(const SolutionBundle& bundle) {
  const int start = bundle.ma_part.max_lag();
  const int run = std::max(1, bundle.factors.b_plus.max_lag());
  const TransferSeries c = transfer_series(bundle.factors.b_plus, bundle.ma_part, kTruncationCap + run);
  double scale = 0.0;
  for (int j = 0; j <= start; ++j) scale = std::max(scale, c[j].cwiseAbs().maxCoeff());
  if (scale == 0.0) return start;
  const double threshold = 1e-12 * std::max(c[0].cwiseAbs().maxCoeff(), 1e-300);
  int quiet = 0;
  for (int h = start + 1; h <= kTruncationCap + run; ++h) {
    quiet = c[h].cwiseAbs().maxCoeff() < threshold ? quiet + 1 : 0;
    if (quiet == run) return std::min(h - run + 1, kTruncationCap);
  }
  return kTruncationCap;
}

Matrix simulate(const SolutionBundle& bundle, int T, const SimulationConfig& config) {
  if (T < 1) throw Error(ErrorKind::InvalidArgument, "simulate: T must be positive");
  const int h = config.truncation > 0 ? config.truncation : default_truncation(bundle);
  const TransferSeries c = transfer_series(bundle.factors.b_plus, bundle.ma_part, h);
  const Eigen::Index n = bundle.model.n;
  const Eigen::Index m = bundle.model.m;

  // Shocks for t = -h .. T-1; the first h draws are burn-in.
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix eps(m, T + h);
  for (Eigen::Index t = 0; t < eps.cols(); ++t) {
    for (Eigen::Index i = 0; i < m; ++i) eps(i, t) = normal(rng);
  }

  Matrix y(T, n);
  for (int t = 0; t < T; ++t) {
    Vector acc = Vector::Zero(n);
    for (int j = 0; j <= h; ++j) acc.noalias() += c[j] * eps.col(t + h - j);
    y.row(t) = acc.transpose();
  }
  return y;
}

}  // namespace ratex
