#pragma once

#include "ratex/laurent_matrix.hpp"

namespace ratex {

/// Singular values in descending order.
Vector singular_values(const Matrix& m);

/// #{sigma_k > tol_rank * sigma_max * max(rows, cols)}.
int numerical_rank(const Vector& singular_values, Eigen::Index rows, Eigen::Index cols, double tol_rank);
int numerical_rank(const Matrix& m, double tol_rank);

/// m (x) I_n.
Matrix kron_identity(const Matrix& m, Eigen::Index n);

/// Orthonormal basis of the right null space under the rank rule.
Matrix null_space(const Matrix& m, double tol_rank);

/// Column-major vectorization.
Vector vec(const Matrix& m);

/// Horizontal concatenation of a list of equally tall blocks.
Matrix hconcat(const std::vector<Matrix>& blocks);

}  // namespace ratex
