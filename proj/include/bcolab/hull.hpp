#pragma once

#include "bcolab/linalg.hpp"

#include <array>
#include <optional>
#include <vector>

namespace bcolab {

/// { y : <normal, y> <= offset }, with |normal| = 1.
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// H- and V-representation of the same polytope.
struct PolytopeRep {
  std::vector<Halfspace> halfspaces;
  std::vector<Vector> vertices;
};

/// Convex hull of planar points, counter-clockwise, collinear points dropped.
std::vector<Vector> hull2d(std::vector<Vector> points);

struct Hull3 {
  std::vector<Vector> points;               // input points
  std::vector<std::array<int, 3>> faces;    // outward-oriented triangles
};

/// Quickhull in 3-D. Points within a relative 1e-10 of a face plane are
/// treated as on the face. Throws InvalidArgument for coplanar input.
Hull3 hull3d(const std::vector<Vector>& points);

/// Both representations of conv(points) for d in {1, 2, 3}. Coplanar hull
/// triangles are merged into a single halfspace.
PolytopeRep polytope_from_points(const std::vector<Vector>& points);

/// Vertices of the bounded polytope cut out by `halfspaces` (d <= 3) by
/// enumerating d-subsets of constraints. Duplicates within `tol` are merged.
std::vector<Vector> enumerate_vertices(const std::vector<Halfspace>& halfspaces,
                                       Eigen::Index d, double tol = 1e-9);

/// max <objective, y> over the bounded polytope; nullopt when infeasible.
std::optional<Vector> maximize_linear(const std::vector<Halfspace>& halfspaces,
                                      const Vector& objective);

/// Area of the convex polygon spanned by coplanar 3-D points.
double planar_polygon_area(const std::vector<Vector>& points, const Vector& normal);

}  // namespace bcolab
