#pragma once

#include "bcolab/convex_function.hpp"
#include "bcolab/hull.hpp"
#include "bcolab/linalg.hpp"

#include <optional>
#include <vector>

namespace bcolab {

/// A compact convex set with non-empty interior in R^d.
///
///  - Polytope:  intersection of halfspaces with unit normals, together with
///    its vertex list (computed when not supplied, d <= 3).
///  - Ellipsoid: { x : (x - c)^T S^{-1} (x - c) <= 1 } for SPD shape S, so the
///    unit ball has S = I and linear images transform as S -> T S T^T.
///  - LevelSet:  { x : g(x) <= level } for a convex g, clipped to a bounding
///    box, with a known interior point. Clipping uses bisection.
class ConvexBody {
 public:
  enum class Kind { Polytope, Ellipsoid, LevelSet };

  static ConvexBody polytope(std::vector<Halfspace> halfspaces,
                             std::optional<std::vector<Vector>> vertices = std::nullopt);
  static ConvexBody from_vertices(const std::vector<Vector>& points);
  static ConvexBody box(const Vector& lo, const Vector& hi);
  static ConvexBody interval(double lo, double hi);
  static ConvexBody ellipsoid(Vector center, Matrix shape);
  static ConvexBody ball(const Vector& center, double radius);
  /// Level set of g. `interior` must satisfy g(interior) < level; the set must
  /// lie inside [bbox_lo, bbox_hi].
  static ConvexBody level_set(ConvexFunction g, double level, Vector interior, Vector bbox_lo,
                              Vector bbox_hi);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return bbox_lo_.size(); }
  const Vector& bbox_lo() const { return bbox_lo_; }
  const Vector& bbox_hi() const { return bbox_hi_; }

  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  /// Halfspace normals stacked as rows, and the matching offsets.
  const Matrix& normal_matrix() const { return normals_; }
  const Vector& offset_vector() const { return offsets_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const Vector& center() const { return center_; }
  const Matrix& shape() const { return shape_; }
  const Matrix& shape_inverse() const { return shape_inv_; }
  const std::optional<ConvexFunction>& function() const { return function_; }
  double level() const { return level_; }

  /// Membership with absolute slack `tol`.
  bool contains(const Vector& x, double tol = 0.0) const;
  /// A point strictly inside the body.
  Vector interior_point() const;
  double diameter() const;

  /// Image under an invertible linear map (polytopes and ellipsoids).
  ConvexBody transformed(const Matrix& t) const;
  ConvexBody translated(const Vector& v) const;
  ConvexBody scaled(double s) const { return transformed(s * Matrix::Identity(dim(), dim())); }

 private:
  ConvexBody() = default;
  void check_invariants() const;

  Kind kind_ = Kind::Polytope;
  Vector bbox_lo_, bbox_hi_;
  std::vector<Halfspace> halfspaces_;
  Matrix normals_;
  Vector offsets_;
  std::vector<Vector> vertices_;
  Vector center_;
  Matrix shape_;
  Matrix shape_inv_;
  std::optional<ConvexFunction> function_;
  double level_ = 0.0;
};

}  // namespace bcolab
