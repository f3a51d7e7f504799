#pragma once

#include <Eigen/Core>

#include "sqconv/types.hpp"

namespace sqconv {

inline constexpr Eigen::Index kMaxEigenDimension = 16;

/// All eigenvalues of a small dense real matrix, sorted by descending real
/// part (ties by descending imaginary part).
ComplexList eigenvalues(const MatrixXd& m);

/// Largest ||M v - lambda v|| / ||M|| over all computed eigenpairs.
double eigenpair_residual(const MatrixXd& m);

/// Number of eigenvalues with strictly positive real part.
int count_unstable(const ComplexList& eigs, double threshold = 0.0);

}  // namespace sqconv
