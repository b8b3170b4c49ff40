#pragma once

#include "bcolab/body.hpp"
#include "bcolab/convex_function.hpp"

#include <optional>

namespace bcolab {

struct Minimum {
  Vector x;
  double value = 0.0;
};

/// Separating hyperplane normal a with body ⊂ {y : <a, y - x> <= 0} when x is
/// outside the body; nullopt when x is inside.
std::optional<Vector> separate(const ConvexBody& body, const Vector& x);

/// Minimizes a convex function over a convex body. Quadratics with an
/// interior stationary point (and all 1-D quadratics on intervals) are solved
/// in closed form; otherwise the central-cut ellipsoid method runs until the
/// certified gap is below `gap_tol` (bisection in d = 1).
Minimum minimize(const ConvexFunction& f, const ConvexBody& body, double gap_tol = 1e-13);

/// Euclidean projection of p onto the body.
Vector project_onto(const ConvexBody& body, const Vector& p);

/// Attaches the exact or certified minimum over `body` to `f`.
ConvexFunction with_computed_minimum(const ConvexFunction& f, const ConvexBody& body);

}  // namespace bcolab
