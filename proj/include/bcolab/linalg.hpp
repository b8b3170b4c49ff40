#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bcolab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Orthonormal basis of the hyperplane x^perp, as the columns of a d x (d-1)
/// matrix. Deterministic in x. Throws ZeroDirection when x == 0.
Matrix orthonormal_complement(const Vector& x);

/// Euclidean projection of y onto x^perp.
Vector project(const Vector& x, const Vector& y);

/// Symmetric matrix function applied through the eigendecomposition. `m` must
/// be symmetric positive definite.
Matrix spd_power(const Matrix& m, double exponent);

/// Symmetric positive definite factor P of the right polar decomposition
/// t = U P, i.e. P = (t^T t)^{1/2}.
Matrix polar_spd_factor(const Matrix& t);

/// Scale `t` so that det(t) == 1. Requires det(t) > 0.
Matrix normalize_det(const Matrix& t);

Vector to_vector(const std::vector<double>& v);
std::vector<double> to_std(const Vector& v);

}  // namespace bcolab
