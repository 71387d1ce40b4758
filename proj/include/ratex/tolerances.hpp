#pragma once

namespace ratex {

struct Tolerances {
  /// Relative half-width of the band around |z| = 1 treated as on the circle.
  double boundary = 1e-9;
  /// Allowed max-abs residual of B - B_- B_+, relative to max(1, max|B|).
  double reconstruction = 1e-8;
  /// Singular values below rank * sigma_max * max(rows, cols) count as zero.
  double rank = 1e-10;

  /// Defaults, with the rank tolerance taken from RATEX_TOL_RANK when set.
  static Tolerances from_environment();
};

}  // namespace ratex
