#pragma once

#include <span>
#include <vector>

#include "cverr/matrix.hpp"

namespace cverr {

// A column is treated as dependent when its norm after orthogonalization
// drops below this fraction of its original norm.
inline constexpr double kRankTolerance = 1e-10;

// Orthonormal projector onto the column space of a design matrix.
// Satisfies P = P^T = P^2 and trace(P) = rank to working precision.
struct ProjectionMatrix {
    Matrix p;  // n x n
    int rank;  // number of independent columns
};

/// Orthonormalize the columns of x (modified Gram-Schmidt).
/// Returns W with W^T W = I and the same column space as x.
/// Throws RankDeficiencyError naming the first dependent column.
Matrix gram_schmidt(const Matrix& x);

/// Projector onto the column space of x, computed as W W^T.
ProjectionMatrix projection_matrix(const Matrix& x);

/// Least-squares coefficients minimizing ||x b - y||.
std::vector<double> solve_normal_equations(const Matrix& x, std::span<const double> y);

/// Fitted values W (W^T y) of the least-squares solution, without
/// forming the full projector.
std::vector<double> least_squares_fitted(const Matrix& x, std::span<const double> y);

}  // namespace cverr
