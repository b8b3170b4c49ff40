#include "bcolab/instances.hpp"

#include "bcolab/error.hpp"
#include "bcolab/geometry.hpp"

#include <cmath>

namespace bcolab::instances {

namespace {

Matrix random_orthogonal(Eigen::Index d, Rng& rng) {
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) g.col(j) = rng.normal_vector(d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace

Matrix random_linear(Eigen::Index d, Rng& rng, double lo, double hi) {
  Vector s(d);
  for (Eigen::Index i = 0; i < d; ++i) s[i] = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  return random_orthogonal(d, rng) * s.asDiagonal() * random_orthogonal(d, rng).transpose();
}

ConvexBody random_polytope(Eigen::Index d, Rng& rng) {
  const Matrix shape = random_linear(d, rng, 0.3, 2.0);
  const auto count = std::max<std::uint64_t>(static_cast<std::uint64_t>(d) + 1, 4 + rng.index(12));
  for (int attempt = 0;; ++attempt) {
    std::vector<Vector> pts;
    for (std::uint64_t i = 0; i < count; ++i) pts.push_back(shape * rng.normal_vector(d));
    try {
      const auto body = ConvexBody::from_vertices(pts);
      return body.translated(-body.interior_point());
    } catch (const Error&) {
      require(attempt < 100, Errc::RejectionFailure, "random_polytope: degenerate samples");
    }
  }
}

Vector random_outside_point(const ConvexBody& body, Rng& rng, double gap_lo, double gap_hi) {
  const Vector c = body.interior_point();
  const Vector u = rng.unit_vector(body.dim());
  const double exit = ray_clip(body, c, u).t_out;
  return c + (exit + rng.uniform(gap_lo, gap_hi) * body.diameter()) * u;
}

Vector uniform_in(const ConvexBody& body, Rng& rng) {
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    Vector p = rng.uniform_box(body.bbox_lo(), body.bbox_hi());
    if (body.contains(p)) return p;
  }
  throw Error(Errc::RejectionFailure, "uniform_in: no accepted sample");
}

ConvexFunction random_quadratic(Eigen::Index d, Rng& rng, const Vector& center, double scale,
                                double offset, double max_cond) {
  const Matrix q = random_linear(d, rng, 1.0, 1.0);
  Vector ev(d);
  for (Eigen::Index i = 0; i < d; ++i) ev[i] = std::exp(-rng.uniform(0.0, std::log(max_cond)));
  ev[0] = 1.0;
  const Matrix a = scale * q * ev.asDiagonal() * q.transpose();
  // (x - c)^T A (x - c) + offset = x^T A x - 2 c^T A x + c^T A c + offset
  return ConvexFunction::quadratic(a, -2.0 * a * center, center.dot(a * center) + offset);
}

ConvexFunction random_max_affine(Eigen::Index d, Rng& rng, const Vector& center, int pieces) {
  Matrix slopes(pieces, d);
  Vector offsets(pieces);
  for (int i = 0; i < pieces; ++i) {
    const Vector s = rng.unit_vector(d) * rng.uniform(0.2, 1.0);
    slopes.row(i) = s.transpose();
    offsets[i] = rng.uniform(0.0, 0.3) - s.dot(center);
  }
  return ConvexFunction::max_affine(slopes, offsets);
}

}  // namespace bcolab::instances
