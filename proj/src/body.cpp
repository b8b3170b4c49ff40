#include "bcolab/body.hpp"

#include "bcolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcolab {

namespace {

void bbox_of(const std::vector<Vector>& pts, Vector& lo, Vector& hi) {
  lo = pts.front();
  hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
}

// Bounded iff the normals positively span R^d, i.e. 0 is interior to their hull.
bool normals_span(const std::vector<Halfspace>& hs, Eigen::Index d) {
  std::vector<Vector> normals;
  for (const auto& h : hs) normals.push_back(h.normal);
  if (d == 1) {
    bool pos = false, neg = false;
    for (const auto& n : normals) pos |= n[0] > 0, neg |= n[0] < 0;
    return pos && neg;
  }
  try {
    const auto rep = polytope_from_points(normals);
    for (const auto& h : rep.halfspaces)
      if (h.offset <= 1e-12) return false;
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

ConvexBody ConvexBody::polytope(std::vector<Halfspace> halfspaces,
                                std::optional<std::vector<Vector>> vertices) {
  require(!halfspaces.empty(), Errc::InvalidArgument, "polytope: no halfspaces");
  const auto d = halfspaces.front().normal.size();
  for (auto& h : halfspaces) {
    require(h.normal.size() == d, Errc::InvalidArgument, "polytope: dimension mismatch");
    const double len = h.normal.norm();
    require(len > 0.0, Errc::InvalidArgument, "polytope: zero normal");
    h.normal /= len;
    h.offset /= len;
  }
  require(normals_span(halfspaces, d), Errc::Unbounded, "polytope: halfspaces do not bound");
  ConvexBody body;
  body.kind_ = Kind::Polytope;
  body.vertices_ = vertices ? std::move(*vertices) : enumerate_vertices(halfspaces, d);
  body.halfspaces_ = std::move(halfspaces);
  body.normals_.resize(static_cast<Eigen::Index>(body.halfspaces_.size()), d);
  body.offsets_.resize(body.normals_.rows());
  for (Eigen::Index i = 0; i < body.normals_.rows(); ++i) {
    body.normals_.row(i) = body.halfspaces_[static_cast<std::size_t>(i)].normal.transpose();
    body.offsets_[i] = body.halfspaces_[static_cast<std::size_t>(i)].offset;
  }
  require(!body.vertices_.empty(), Errc::InvalidArgument, "polytope: empty");
  bbox_of(body.vertices_, body.bbox_lo_, body.bbox_hi_);
  body.check_invariants();
  return body;
}

ConvexBody ConvexBody::from_vertices(const std::vector<Vector>& points) {
  auto rep = polytope_from_points(points);
  return polytope(std::move(rep.halfspaces), std::move(rep.vertices));
}

ConvexBody ConvexBody::box(const Vector& lo, const Vector& hi) {
  const auto d = lo.size();
  require(hi.size() == d && (hi.array() > lo.array()).all(), Errc::InvalidArgument,
          "box: need lo < hi");
  std::vector<Halfspace> hs;
  for (Eigen::Index i = 0; i < d; ++i) {
    hs.push_back({Vector::Unit(d, i), hi[i]});
    hs.push_back({-Vector::Unit(d, i), -lo[i]});
  }
  std::vector<Vector> verts;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = (mask >> i) & 1u ? hi[i] : lo[i];
    verts.push_back(v);
  }
  return polytope(std::move(hs), std::move(verts));
}

ConvexBody ConvexBody::interval(double lo, double hi) {
  return box(Vector::Constant(1, lo), Vector::Constant(1, hi));
}

ConvexBody ConvexBody::ellipsoid(Vector center, Matrix shape) {
  const auto d = center.size();
  require(shape.rows() == d && shape.cols() == d, Errc::InvalidArgument,
          "ellipsoid: shape dimension mismatch");
  Matrix sym = 0.5 * (shape + shape.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() > 0.0, Errc::InvalidArgument,
          "ellipsoid: shape must be positive definite");
  ConvexBody body;
  body.kind_ = Kind::Ellipsoid;
  const Vector half = sym.diagonal().cwiseSqrt();
  body.bbox_lo_ = center - half;
  body.bbox_hi_ = center + half;
  body.center_ = std::move(center);
  body.shape_inv_ = sym.inverse();
  body.shape_ = std::move(sym);
  return body;
}

ConvexBody ConvexBody::ball(const Vector& center, double radius) {
  require(radius > 0.0, Errc::InvalidArgument, "ball: radius must be positive");
  const auto d = center.size();
  return ellipsoid(center, radius * radius * Matrix::Identity(d, d));
}

ConvexBody ConvexBody::level_set(ConvexFunction g, double level, Vector interior, Vector lo,
                                 Vector hi) {
  require(g(interior) < level, Errc::InvalidArgument,
          "level_set: interior point must satisfy g < level");
  require((hi.array() > lo.array()).all(), Errc::Unbounded, "level_set: bad bounding box");
  ConvexBody body;
  body.kind_ = Kind::LevelSet;
  body.function_ = std::move(g);
  body.level_ = level;
  body.center_ = std::move(interior);
  body.bbox_lo_ = std::move(lo);
  body.bbox_hi_ = std::move(hi);
  return body;
}

void ConvexBody::check_invariants() const {
  require(bbox_lo_.allFinite() && bbox_hi_.allFinite(), Errc::Unbounded,
          "body: bounding box not finite");
  if (kind_ == Kind::Polytope) {
    const Vector c = interior_point();
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& h : halfspaces_) slack = std::min(slack, h.offset - h.normal.dot(c));
    const double scale = std::max(1e-300, (bbox_hi_ - bbox_lo_).maxCoeff());
    require(slack > 1e-12 * scale, Errc::InvalidArgument, "polytope: empty interior");
  }
}

bool ConvexBody::contains(const Vector& x, double tol) const {
  switch (kind_) {
    case Kind::Polytope:
      return (normals_ * x - offsets_).maxCoeff() <= tol;
    case Kind::Ellipsoid: {
      const Vector r = x - center_;
      return r.dot(shape_inv_ * r) <= (1.0 + tol) * (1.0 + tol);
    }
    case Kind::LevelSet:
      if (((x - bbox_lo_).array() < -tol).any() || ((x - bbox_hi_).array() > tol).any())
        return false;
      return (*function_)(x) <= level_ + tol;
  }
  return false;
}

Vector ConvexBody::interior_point() const {
  if (kind_ != Kind::Polytope) return center_;
  Vector c = Vector::Zero(dim());
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

double ConvexBody::diameter() const {
  switch (kind_) {
    case Kind::Polytope: {
      double best = 0.0;
      for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
          best = std::max(best, (vertices_[i] - vertices_[j]).norm());
      return best;
    }
    case Kind::Ellipsoid: {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(shape_, Eigen::EigenvaluesOnly);
      return 2.0 * std::sqrt(eig.eigenvalues().maxCoeff());
    }
    case Kind::LevelSet:
      return (bbox_hi_ - bbox_lo_).norm();
  }
  return 0.0;
}

ConvexBody ConvexBody::transformed(const Matrix& t) const {
  require(t.rows() == dim() && t.cols() == dim(), Errc::InvalidArgument,
          "transformed: dimension mismatch");
  require(std::abs(t.determinant()) > 0.0, Errc::InvalidArgument,
          "transformed: map must be invertible");
  switch (kind_) {
    case Kind::Polytope: {
      const Matrix tinv_t = t.inverse().transpose();
      std::vector<Halfspace> hs;
      hs.reserve(halfspaces_.size());
      for (const auto& h : halfspaces_) hs.push_back({tinv_t * h.normal, h.offset});
      std::vector<Vector> verts;
      verts.reserve(vertices_.size());
      for (const auto& v : vertices_) verts.push_back(t * v);
      return polytope(std::move(hs), std::move(verts));
    }
    case Kind::Ellipsoid:
      return ellipsoid(t * center_, t * shape_ * t.transpose());
    case Kind::LevelSet:
      break;
  }
  throw Error(Errc::InvalidArgument, "transformed: level-set bodies cannot be mapped");
}

ConvexBody ConvexBody::translated(const Vector& v) const {
  switch (kind_) {
    case Kind::Polytope: {
      std::vector<Halfspace> hs = halfspaces_;
      for (auto& h : hs) h.offset += h.normal.dot(v);
      std::vector<Vector> verts = vertices_;
      for (auto& p : verts) p += v;
      return polytope(std::move(hs), std::move(verts));
    }
    case Kind::Ellipsoid:
      return ellipsoid(center_ + v, shape_);
    case Kind::LevelSet:
      break;
  }
  throw Error(Errc::InvalidArgument, "translated: level-set bodies cannot be moved");
}

}  // namespace bcolab
