#include "bcolab/geometry.hpp"

#include "bcolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double body_scale(const ConvexBody& body) {
  return std::max({1.0, body.bbox_lo().cwiseAbs().maxCoeff(), body.bbox_hi().cwiseAbs().maxCoeff()});
}

std::optional<Interval> clip_halfspaces(const Matrix& normals, const Vector& offsets,
                                        const Vector& o, const Vector& u, double tol) {
  const Vector rate = normals * u;
  const Vector slack = offsets - normals * o;
  double lo = -kInf, hi = kInf;
  for (Eigen::Index i = 0; i < rate.size(); ++i) {
    const double a = rate[i];
    const double c = slack[i];
    if (std::abs(a) <= 1e-15) {
      if (c < -tol) return std::nullopt;
      continue;
    }
    const double t = c / a;
    if (a > 0.0) {
      hi = std::min(hi, t);
    } else {
      lo = std::max(lo, t);
    }
  }
  if (lo > hi) {
    if (lo - hi > tol) return std::nullopt;
    const double mid = 0.5 * (lo + hi);
    lo = hi = mid;
  }
  return Interval{lo, hi};
}

std::optional<Interval> clip_ellipsoid(const ConvexBody& body, const Vector& o, const Vector& u) {
  const Matrix& q = body.shape_inverse();
  const Vector r = o - body.center();
  const Vector qu = q * u;
  const double a = u.dot(qu);
  const double b = 2.0 * r.dot(qu);
  const double c = r.dot(q * r) - 1.0;
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    if (disc < -1e-12 * std::max(b * b, std::abs(4.0 * a * c))) return std::nullopt;
    disc = 0.0;
  }
  const double sq = std::sqrt(disc);
  double t1, t2;
  const double qq = -0.5 * (b + std::copysign(sq, b));
  if (qq != 0.0) {
    t1 = qq / a;
    t2 = c / qq;
  } else {
    t1 = std::sqrt(std::max(0.0, -c / a));
    t2 = -t1;
  }
  return Interval{std::min(t1, t2), std::max(t1, t2)};
}

std::optional<Interval> clip_level_set(const ConvexBody& body, const Vector& o, const Vector& u) {
  const auto d = body.dim();
  Matrix normals(2 * d, d);
  normals << Matrix::Identity(d, d), -Matrix::Identity(d, d);
  Vector offsets(2 * d);
  offsets << body.bbox_hi(), -body.bbox_lo();
  auto range = clip_halfspaces(normals, offsets, o, u, 0.0);
  if (!range) return std::nullopt;
  const auto& g = *body.function();
  const double level = body.level();
  auto at = [&](double t) { return g(o + t * u); };

  // Golden-section minimization of the convex profile.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = range->t_in, b = range->t_out;
  double c = b - kInvPhi * (b - a), e = a + kInvPhi * (b - a);
  double fc = at(c), fe = at(e);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fe) {
      b = e, e = c, fe = fc;
      c = b - kInvPhi * (b - a);
      fc = at(c);
    } else {
      a = c, c = e, fc = fe;
      e = a + kInvPhi * (b - a);
      fe = at(e);
    }
  }
  const double tmin = 0.5 * (a + b);
  if (at(tmin) > level) return std::nullopt;

  auto crossing = [&](double inside, double outside) {
    if (at(outside) <= level) return outside;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (std::abs(outside - inside) <= 1e-13 * std::max(1.0, std::abs(mid))) break;
      (at(mid) <= level ? inside : outside) = mid;
    }
    return inside;
  };
  return Interval{crossing(tmin, range->t_in), crossing(tmin, range->t_out)};
}

}  // namespace

std::optional<Interval> try_ray_clip(const ConvexBody& body, const Vector& origin,
                                     const Vector& dir) {
  require(origin.size() == body.dim() && dir.size() == body.dim(), Errc::InvalidArgument,
          "ray_clip: dimension mismatch");
  require(std::abs(dir.norm() - 1.0) < 1e-9, Errc::InvalidArgument,
          "ray_clip: direction must be unit length");
  switch (body.kind()) {
    case ConvexBody::Kind::Polytope: {
      auto iv = clip_halfspaces(body.normal_matrix(), body.offset_vector(), origin, dir, 1e-12 * body_scale(body));
      if (iv) {
        require(std::isfinite(iv->t_in) && std::isfinite(iv->t_out), Errc::Unbounded,
                "ray_clip: polytope is unbounded along the line");
      }
      return iv;
    }
    case ConvexBody::Kind::Ellipsoid:
      return clip_ellipsoid(body, origin, dir);
    case ConvexBody::Kind::LevelSet:
      return clip_level_set(body, origin, dir);
  }
  return std::nullopt;
}

Interval ray_clip(const ConvexBody& body, const Vector& origin, const Vector& dir) {
  auto iv = try_ray_clip(body, origin, dir);
  require(iv.has_value(), Errc::NoIntersection, "line misses the body");
  return *iv;
}

namespace {

void require_outside(const ConvexBody& body, const Vector& x) {
  require(!body.contains(x, 1e-12 * body_scale(body)), Errc::XInsideBody,
          "x must lie strictly outside the body");
}

std::optional<Interval> fibre(const ConvexBody& body, const Vector& x, const Vector& z) {
  return try_ray_clip(body, z, x / x.norm());
}

double psi_on_fibre(const ConvexBody& body, const Vector& x, const Vector& z, const Interval& iv) {
  const Vector y = z + iv.t_in * (x / x.norm());
  const Vector diff = y - x;
  const double len = diff.norm();
  const auto chord = try_ray_clip(body, x, diff / len);
  if (!chord) return 0.0;
  const double depth = std::min(chord->t_out, len) - std::max(chord->t_in, 0.0);
  return std::clamp(depth / len, 0.0, 1.0);
}

double psi_unchecked(const ConvexBody& body, const Vector& x, const Vector& z) {
  const auto iv = fibre(body, x, z);
  if (!iv) throw Error(Errc::NoIntersection, "z is not in the shadow");
  return psi_on_fibre(body, x, z, *iv);
}

}  // namespace

bool in_shadow(const ConvexBody& body, const Vector& x, const Vector& z) {
  require_outside(body, x);
  require(x.norm() > 0.0, Errc::ZeroDirection, "x must be nonzero");
  return fibre(body, x, z).has_value();
}

Vector pi_far(const ConvexBody& body, const Vector& x, const Vector& z) {
  require_outside(body, x);
  const Vector u = x / x.norm();
  const Interval iv = ray_clip(body, z, u);
  return z + iv.t_in * u;
}

double psi_point(const ConvexBody& body, const Vector& x, const Vector& z) {
  require_outside(body, x);
  return psi_unchecked(body, x, z);
}

ShadowSampler::ShadowSampler(const ConvexBody& body, const Vector& x) : body_(&body), x_(x) {
  const auto d = body.dim();
  basis_ = orthonormal_complement(x);
  if (d == 1) {
    lo_ = hi_ = Vector::Zero(0);
    return;
  }
  lo_ = Vector::Constant(d - 1, kInf);
  hi_ = Vector::Constant(d - 1, -kInf);
  auto include = [&](const Vector& p) {
    const Vector w = basis_.transpose() * p;
    lo_ = lo_.cwiseMin(w);
    hi_ = hi_.cwiseMax(w);
  };
  switch (body.kind()) {
    case ConvexBody::Kind::Polytope:
      for (const auto& v : body.vertices()) include(v);
      break;
    case ConvexBody::Kind::Ellipsoid: {
      const Vector c = basis_.transpose() * body.center();
      const Vector half = (basis_.transpose() * body.shape() * basis_).diagonal().cwiseSqrt();
      lo_ = c - half;
      hi_ = c + half;
      break;
    }
    case ConvexBody::Kind::LevelSet:
      for (unsigned mask = 0; mask < (1u << d); ++mask) {
        Vector p(d);
        for (Eigen::Index i = 0; i < d; ++i)
          p[i] = (mask >> i) & 1u ? body.bbox_hi()[i] : body.bbox_lo()[i];
        include(p);
      }
      break;
  }
}

Vector ShadowSampler::sample(Rng& rng) const {
  Interval iv;
  return sample(rng, iv);
}

Vector ShadowSampler::sample(Rng& rng, Interval& out) const {
  if (basis_.cols() == 0) {
    out = ray_clip(*body_, Vector::Zero(x_.size()), x_ / x_.norm());
    return Vector::Zero(x_.size());
  }
  for (std::size_t attempt = 0; attempt < kRejectionCap; ++attempt) {
    const Vector z = basis_ * rng.uniform_box(lo_, hi_);
    if (auto iv = fibre(*body_, x_, z)) {
      out = *iv;
      return z;
    }
  }
  throw Error(Errc::RejectionFailure, "shadow rejection sampler never accepted");
}

namespace {

PsiReport psi_report(const ConvexBody& body, const Vector& x, std::size_t samples,
                     std::uint64_t seed) {
  require_outside(body, x);
  require(samples >= 1, Errc::InvalidArgument, "psi_avg: samples must be >= 1");
  PsiReport rep;
  const Vector origin_fibre = project(x, Vector::Zero(x.size()));
  if (body.dim() == 1) {
    const double v = psi_unchecked(body, x, origin_fibre);
    rep.point_value = rep.avg_value = rep.max_value = v;
    rep.mc_samples = 1;
    return rep;
  }
  const auto origin_iv = fibre(body, x, origin_fibre);
  rep.point_value = origin_iv ? psi_on_fibre(body, x, origin_fibre, *origin_iv) : 0.0;

  ShadowSampler sampler(body, x);
  Rng rng(seed, "psi");
  double sum = 0.0, sum_sq = 0.0, best = -1.0;
  Vector best_z, centroid = Vector::Zero(x.size());
  for (std::size_t i = 0; i < samples; ++i) {
    Interval iv;
    const Vector z = sampler.sample(rng, iv);
    const double v = psi_on_fibre(body, x, z, iv);
    sum += v;
    sum_sq += v * v;
    centroid += z;
    if (v > best) best = v, best_z = z;
  }
  const double n = static_cast<double>(samples);
  rep.mc_samples = samples;
  rep.avg_value = sum / n;
  const double var = samples > 1 ? std::max(0.0, (sum_sq - n * rep.avg_value * rep.avg_value) / (n - 1.0)) : 0.0;
  rep.mc_stderr = std::sqrt(var / n);
  centroid /= n;

  // Ternary refinement along [best_z, centroid]; the centroid of shadow points
  // lies in the (convex) shadow, so the whole segment is admissible.
  auto along = [&](double s) {
    const Vector z = best_z + s * (centroid - best_z);
    const auto iv = fibre(body, x, z);
    return iv ? psi_on_fibre(body, x, z, *iv) : 0.0;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < kPsiMaxRefineIterations; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (along(m1) < along(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  rep.max_value = std::max({best, along(0.5 * (lo + hi)), rep.point_value});
  return rep;
}

}  // namespace

PsiReport psi_avg(const ConvexBody& body, const Vector& x, std::size_t samples,
                  std::uint64_t seed) {
  return psi_report(body, x, samples, seed);
}

double psi_max(const ConvexBody& body, const Vector& x, std::size_t samples, std::uint64_t seed) {
  return psi_report(body, x, samples, seed).max_value;
}

}  // namespace bcolab
