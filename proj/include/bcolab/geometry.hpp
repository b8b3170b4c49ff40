#pragma once

#include "bcolab/body.hpp"
#include "bcolab/random.hpp"

#include <cstdint>
#include <optional>

namespace bcolab {

/// Parameter interval of a line {origin + t dir} inside a body.
struct Interval {
  double t_in = 0.0;
  double t_out = 0.0;
  double length() const { return t_out - t_in; }
};

struct Chord {
  Vector a, b;
  double length() const { return (a - b).norm(); }
};

/// Clips the line {origin + t dir} against `body`. `dir` must be unit length.
/// Exact for polytopes and ellipsoids; bisection to 1e-12 for level sets.
/// Throws NoIntersection when the line misses the body.
Interval ray_clip(const ConvexBody& body, const Vector& origin, const Vector& dir);

/// Non-throwing variant of ray_clip.
std::optional<Interval> try_ray_clip(const ConvexBody& body, const Vector& origin,
                                     const Vector& dir);

/// True iff the line {z + t x} meets the body, i.e. z lies in the shadow P_x(K).
/// Throws XInsideBody when x belongs to the body.
bool in_shadow(const ConvexBody& body, const Vector& x, const Vector& z);

/// The point of body ∩ {z + t x} minimizing <y, x>: the far end of the body
/// as seen from x along the shadow fibre through z.
Vector pi_far(const ConvexBody& body, const Vector& x, const Vector& z);

/// Depth/distance ratio: the fraction of the chord [x, pi_far(x, z)] that
/// lies inside the body. In [0, 1].
double psi_point(const ConvexBody& body, const Vector& x, const Vector& z);

struct PsiReport {
  double point_value = 0.0;  // at z = P_x(0)
  double avg_value = 0.0;    // mean over the uniform shadow measure
  double max_value = 0.0;    // maximum over the shadow
  std::size_t mc_samples = 0;
  double mc_stderr = 0.0;
};

/// Uniform sampler on the shadow P_x(K) by rejection from the bounding box of
/// the projected body, expressed in an orthonormal basis of x^perp.
class ShadowSampler {
 public:
  ShadowSampler(const ConvexBody& body, const Vector& x);

  /// A uniform point of the shadow, as a d-vector in x^perp. Throws
  /// RejectionFailure after `kRejectionCap` consecutive misses.
  Vector sample(Rng& rng) const;
  /// As sample, also returning the fibre through the point.
  Vector sample(Rng& rng, Interval& fibre) const;
  /// Maps shadow coordinates w (length d-1) to the d-vector U w.
  Vector embed(const Vector& w) const { return basis_ * w; }
  /// Inverse of embed for points in x^perp.
  Vector coords(const Vector& z) const { return basis_.transpose() * z; }

  const Matrix& basis() const { return basis_; }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

  static constexpr std::size_t kRejectionCap = 1'000'000;

 private:
  const ConvexBody* body_;
  Vector x_;
  Matrix basis_;
  Vector lo_, hi_;
};

/// Monte Carlo estimate of the averaged ratio with standard error; exact in
/// d = 1 where the shadow is a single point. Deterministic in `seed`.
PsiReport psi_avg(const ConvexBody& body, const Vector& x, std::size_t samples,
                  std::uint64_t seed);

/// Maximum ratio: best sampled z refined by ternary search along the segment
/// toward the shadow centroid (concavity makes the search exact on that line).
double psi_max(const ConvexBody& body, const Vector& x, std::size_t samples,
               std::uint64_t seed);

/// Number of ternary-search iterations used by psi_max.
inline constexpr int kPsiMaxRefineIterations = 60;

}  // namespace bcolab
