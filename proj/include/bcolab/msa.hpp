#pragma once

#include "bcolab/body.hpp"
#include "bcolab/random.hpp"

#include <cstdint>
#include <vector>

namespace bcolab {

struct Facet {
  Vector normal;  // unit outer normal
  double area = 0.0;
  std::vector<Vector> vertices;  // facet polygon (edge endpoints when d = 2)
};

/// Surface area measure of a polytope: one atom per facet.
struct SurfaceMeasure {
  std::vector<Facet> facets;
  double total_area = 0.0;

  /// sum_i a_i u_i u_i^T
  Matrix second_moment() const;
  /// |sum_i a_i u_i| (closed-surface defect).
  double closure_defect() const;
};

/// Facet areas and normals for d in {2, 3}. Halfspaces with identical normals
/// are merged; a remaining facet of zero area raises DegenerateFacet.
SurfaceMeasure surface_measure(const ConvexBody& polytope);

/// Frobenius distance of sum_i a_i u_i u_i^T from (S/d) Id.
double isotropy_residual(const SurfaceMeasure& sm);

struct PositionResult {
  Matrix transform;        // symmetric positive definite, det = 1
  double residual = 0.0;   // isotropy residual of transform * K
  int iterations = 0;
  bool converged = false;
};

/// Volume-preserving linear map placing the polytope in minimal surface area
/// position, by a damped fixed-point iteration on the isotropy condition.
/// On failure to reach `tol` within `max_iter` the best iterate is returned
/// with converged = false.
PositionResult msa_transform(const ConvexBody& polytope, double tol = 1e-9, int max_iter = 500);

/// Like msa_transform but throws NoConvergence instead of flagging.
PositionResult msa_transform_strict(const ConvexBody& polytope, double tol = 1e-9,
                                    int max_iter = 500);

struct ShadowRatio {
  double max_ratio = 0.0;
  Vector direction;
};

/// Shadow volume of a polytope in direction theta via Cauchy's projection
/// formula: 1/2 sum_i a_i |<u_i, theta>|.
double shadow_volume(const SurfaceMeasure& sm, const Vector& theta);

/// max over directions of total surface area / shadow volume. The sampled
/// set always contains the coordinate axes; `directions` further uniform
/// directions are drawn from `seed`.
ShadowRatio shadow_surface_ratio(const ConvexBody& polytope, std::size_t directions,
                                 std::uint64_t seed);
ShadowRatio shadow_surface_ratio(const SurfaceMeasure& sm, Eigen::Index d,
                                 std::size_t directions, std::uint64_t seed);

/// Uniform sample on the boundary of a polytope (facet chosen with
/// probability proportional to area, then uniform within the facet).
Vector sample_boundary(const SurfaceMeasure& sm, Rng& rng);

}  // namespace bcolab
