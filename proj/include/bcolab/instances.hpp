#pragma once

#include "bcolab/body.hpp"
#include "bcolab/convex_function.hpp"
#include "bcolab/random.hpp"

namespace bcolab::instances {

/// d x d matrix with singular values drawn log-uniformly from [lo, hi] and
/// Haar-like orthogonal factors.
Matrix random_linear(Eigen::Index d, Rng& rng, double lo = 0.3, double hi = 3.0);

/// Hull of 4 to 15 anisotropic Gaussian points (at least d + 1), translated so
/// that the vertex centroid is the origin.
ConvexBody random_polytope(Eigen::Index d, Rng& rng);

/// A point outside `body` on a random ray from its interior point, at a gap
/// in [gap_lo, gap_hi] times the body's diameter beyond the boundary.
Vector random_outside_point(const ConvexBody& body, Rng& rng, double gap_lo = 0.05,
                            double gap_hi = 3.0);

/// Uniform point of the body by rejection from its bounding box.
Vector uniform_in(const ConvexBody& body, Rng& rng);

/// (x - c)^T A (x - c) * scale + offset with A SPD of condition number up to
/// `max_cond` and unit largest eigenvalue.
ConvexFunction random_quadratic(Eigen::Index d, Rng& rng, const Vector& center, double scale,
                                double offset, double max_cond = 4.0);

/// Maximum of `pieces` affine maps with random slopes of norm in [0.2, 1]
/// through values in [0, 0.3] at `center`.
ConvexFunction random_max_affine(Eigen::Index d, Rng& rng, const Vector& center, int pieces);

}  // namespace bcolab::instances
