#include "bcolab/minimize.hpp"

#include "bcolab/error.hpp"

#include <algorithm>
#include <cmath>

namespace bcolab {

std::optional<Vector> separate(const ConvexBody& body, const Vector& x) {
  const auto d = body.dim();
  switch (body.kind()) {
    case ConvexBody::Kind::Polytope: {
      double worst = 0.0;
      const Halfspace* cut = nullptr;
      for (const auto& h : body.halfspaces()) {
        const double v = h.normal.dot(x) - h.offset;
        if (v > worst) worst = v, cut = &h;
      }
      if (!cut) return std::nullopt;
      return cut->normal;
    }
    case ConvexBody::Kind::Ellipsoid: {
      const Vector r = x - body.center();
      if (r.dot(body.shape_inverse() * r) <= 1.0) return std::nullopt;
      return body.shape_inverse() * r;
    }
    case ConvexBody::Kind::LevelSet: {
      for (Eigen::Index i = 0; i < d; ++i) {
        if (x[i] > body.bbox_hi()[i]) return Vector(Vector::Unit(d, i));
        if (x[i] < body.bbox_lo()[i]) return Vector(-Vector::Unit(d, i));
      }
      if ((*body.function())(x) <= body.level()) return std::nullopt;
      return body.function()->subgradient(x);
    }
  }
  return std::nullopt;
}

namespace {

std::optional<Minimum> closed_form_quadratic(const ConvexFunction& f, const ConvexBody& body) {
  const auto q = f.as_quadratic();
  if (!q) return std::nullopt;
  const auto d = body.dim();
  if (d == 1 && body.kind() != ConvexBody::Kind::LevelSet) {
    const double lo = body.bbox_lo()[0], hi = body.bbox_hi()[0];
    double x = q->a(0, 0) > 0.0 ? -q->b[0] / (2.0 * q->a(0, 0)) : (q->b[0] > 0.0 ? lo : hi);
    x = std::clamp(x, lo, hi);
    Vector v = Vector::Constant(1, x);
    return Minimum{v, f(v)};
  }
  Eigen::LDLT<Matrix> ldlt(q->a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  Vector x = ldlt.solve(-0.5 * q->b);
  if (!x.allFinite() || (2.0 * q->a * x + q->b).norm() > 1e-10 || !body.contains(x)) {
    return std::nullopt;
  }
  return Minimum{x, f(x)};
}

Minimum bisect_1d(const ConvexFunction& f, const ConvexBody& body, double gap_tol) {
  double lo = body.bbox_lo()[0], hi = body.bbox_hi()[0];
  Vector best;
  double best_val = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
    const Vector c = Vector::Constant(1, 0.5 * (lo + hi));
    Vector g;
    if (auto a = separate(body, c)) {
      g = *a;
    } else {
      const double v = f(c);
      if (v < best_val) best_val = v, best = c;
      g = f.subgradient(c);
      if (std::abs(g[0]) * (hi - lo) * 0.5 <= gap_tol) break;
    }
    if (g[0] > 0.0) {
      hi = c[0];
    } else if (g[0] < 0.0) {
      lo = c[0];
    } else {
      break;
    }
  }
  if (best.size() == 0) best = body.interior_point(), best_val = f(best);
  return {best, best_val};
}

}  // namespace

Minimum minimize(const ConvexFunction& f, const ConvexBody& body, double gap_tol) {
  require(f.dim() == body.dim(), Errc::InvalidArgument, "minimize: dimension mismatch");
  if (auto exact = closed_form_quadratic(f, body)) return *exact;
  const auto d = body.dim();
  if (d == 1) return bisect_1d(f, body, gap_tol);

  Vector c = 0.5 * (body.bbox_lo() + body.bbox_hi());
  const double radius = 0.5 * (body.bbox_hi() - body.bbox_lo()).norm() * 1.01 + 1e-12;
  Matrix p = radius * radius * Matrix::Identity(d, d);
  const double dd = static_cast<double>(d);
  Minimum best{body.interior_point(), f(body.interior_point())};
  for (int it = 0; it < 20000; ++it) {
    Vector g;
    if (auto a = separate(body, c)) {
      g = *a;
    } else {
      const double v = f(c);
      if (v < best.value) best = {c, v};
      g = f.subgradient(c);
      const double gap = std::sqrt(std::max(0.0, g.dot(p * g)));
      if (gap <= gap_tol) break;
    }
    const double gpg = g.dot(p * g);
    if (!(gpg > 0.0)) break;
    const Vector pg = p * g / std::sqrt(gpg);
    c -= pg / (dd + 1.0);
    p = (dd * dd / (dd * dd - 1.0)) * (p - (2.0 / (dd + 1.0)) * pg * pg.transpose());
    p = 0.5 * (p + p.transpose());
  }
  return best;
}

Vector project_onto(const ConvexBody& body, const Vector& p) {
  if (body.contains(p)) return p;
  const auto d = body.dim();
  const auto dist = ConvexFunction::quadratic(Matrix::Identity(d, d), -2.0 * p, p.squaredNorm());
  return minimize(dist, body, 1e-20).x;
}

ConvexFunction with_computed_minimum(const ConvexFunction& f, const ConvexBody& body) {
  const auto m = minimize(f, body);
  return f.with_minimum(m.x, m.value);
}

}  // namespace bcolab
