#include "bcolab/msa.hpp"

#include "bcolab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcolab {

Matrix SurfaceMeasure::second_moment() const {
  const auto d = facets.empty() ? 0 : facets.front().normal.size();
  Matrix m = Matrix::Zero(d, d);
  for (const auto& f : facets) m += f.area * f.normal * f.normal.transpose();
  return m;
}

double SurfaceMeasure::closure_defect() const {
  if (facets.empty()) return 0.0;
  Vector s = Vector::Zero(facets.front().normal.size());
  for (const auto& f : facets) s += f.area * f.normal;
  return s.norm();
}

namespace {

// Ordered polygon of coplanar 3-D points, mapped back from in-plane coordinates.
std::vector<Vector> ordered_polygon(const std::vector<Vector>& pts, const Vector& normal,
                                    double offset) {
  const Matrix basis = orthonormal_complement(normal);
  std::vector<Vector> flat;
  for (const auto& p : pts) flat.push_back(basis.transpose() * p);
  std::vector<Vector> out;
  for (const auto& w : hull2d(flat)) out.push_back(basis * w + offset * normal);
  return out;
}

double polygon_area(const std::vector<Vector>& poly) {
  if (poly.size() < 3) return 0.0;
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  const Eigen::Vector3d o(poly[0][0], poly[0][1], poly[0][2]);
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const Eigen::Vector3d a(poly[i][0], poly[i][1], poly[i][2]);
    const Eigen::Vector3d b(poly[i + 1][0], poly[i + 1][1], poly[i + 1][2]);
    acc += (a - o).cross(b - o);
  }
  return 0.5 * acc.norm();
}

double total_area_of(const std::vector<Vector>& area_vectors) {
  double s = 0.0;
  for (const auto& w : area_vectors) s += w.norm();
  return s;
}

double residual_of(const std::vector<Vector>& area_vectors) {
  const auto d = area_vectors.front().size();
  Matrix m = Matrix::Zero(d, d);
  double s = 0.0;
  for (const auto& w : area_vectors) {
    const double a = w.norm();
    if (a > 0.0) m += w * w.transpose() / a;
    s += a;
  }
  return (m - (s / static_cast<double>(d)) * Matrix::Identity(d, d)).norm();
}

Matrix moment_of(const std::vector<Vector>& area_vectors) {
  const auto d = area_vectors.front().size();
  Matrix m = Matrix::Zero(d, d);
  for (const auto& w : area_vectors) {
    const double a = w.norm();
    if (a > 0.0) m += w * w.transpose() / a;
  }
  return m;
}

std::vector<Vector> apply_cofactor(const std::vector<Vector>& area_vectors, const Matrix& t) {
  // det(t) == 1, so the area vector a u of a facet maps to t^{-T} (a u).
  const Matrix cof = t.inverse().transpose();
  std::vector<Vector> out;
  out.reserve(area_vectors.size());
  for (const auto& w : area_vectors) out.push_back(cof * w);
  return out;
}

}  // namespace

SurfaceMeasure surface_measure(const ConvexBody& polytope) {
  require(polytope.kind() == ConvexBody::Kind::Polytope, Errc::InvalidArgument,
          "surface_measure: body must be a polytope");
  const auto d = polytope.dim();
  require(d == 2 || d == 3, Errc::InvalidArgument, "surface_measure: d must be 2 or 3");
  const auto& verts = polytope.vertices();
  const double scale = std::max(1.0, (polytope.bbox_hi() - polytope.bbox_lo()).maxCoeff());
  const double tol = 1e-9 * scale;

  // Merge halfspaces sharing a normal; the tightest offset is the facet.
  std::vector<Halfspace> unique;
  for (const auto& h : polytope.halfspaces()) {
    auto it = std::find_if(unique.begin(), unique.end(), [&](const Halfspace& u) {
      return (u.normal - h.normal).norm() < 1e-9;
    });
    if (it == unique.end()) {
      unique.push_back(h);
    } else {
      it->offset = std::min(it->offset, h.offset);
    }
  }

  SurfaceMeasure sm;
  for (const auto& h : unique) {
    std::vector<Vector> on;
    for (const auto& v : verts)
      if (std::abs(h.normal.dot(v) - h.offset) <= tol) on.push_back(v);
    Facet f{h.normal, 0.0, {}};
    if (d == 2 && on.size() >= 2) {
      const Vector tangent{{-h.normal[1], h.normal[0]}};
      auto [lo, hi] = std::minmax_element(on.begin(), on.end(), [&](const Vector& a, const Vector& b) {
        return tangent.dot(a) < tangent.dot(b);
      });
      f.vertices = {*lo, *hi};
      f.area = (*hi - *lo).norm();
    } else if (d == 3 && on.size() >= 3) {
      f.vertices = ordered_polygon(on, h.normal, h.offset);
      f.area = polygon_area(f.vertices);
    }
    require(f.area > 1e-14 * scale, Errc::DegenerateFacet, "surface_measure: facet of zero area");
    sm.total_area += f.area;
    sm.facets.push_back(std::move(f));
  }
  return sm;
}

double isotropy_residual(const SurfaceMeasure& sm) {
  const auto d = sm.facets.front().normal.size();
  return (sm.second_moment() - (sm.total_area / static_cast<double>(d)) * Matrix::Identity(d, d))
      .norm();
}

PositionResult msa_transform(const ConvexBody& polytope, double tol, int max_iter) {
  require(tol > 0.0, Errc::InvalidArgument, "msa_transform: tol must be positive");
  const SurfaceMeasure sm = surface_measure(polytope);
  const auto d = polytope.dim();
  std::vector<Vector> w;
  for (const auto& f : sm.facets) w.push_back(f.area * f.normal);

  Matrix t = Matrix::Identity(d, d);
  double area = total_area_of(w);
  double residual = residual_of(w);
  int it = 0;
  for (; it < max_iter && residual > tol; ++it) {
    // Fixed point of the isotropy condition: move by M^{1/2} (det 1), i.e.
    // half of the log-step that would equalize M in one go for a box.
    const Matrix m = moment_of(w);
    Matrix step = normalize_det(spd_power(m, 0.5));
    std::vector<Vector> next = apply_cofactor(w, step);
    double next_area = total_area_of(next);
    for (int damp = 0; damp < 40 && next_area > area; ++damp) {
      step = normalize_det(spd_power(0.5 * (step + step.transpose()), 0.5));
      next = apply_cofactor(w, step);
      next_area = total_area_of(next);
    }
    if (next_area > area) break;
    w = std::move(next);
    t = step * t;
    area = next_area;
    residual = residual_of(w);
  }

  PositionResult out;
  out.transform = polar_spd_factor(t);
  out.transform = normalize_det(out.transform);
  std::vector<Vector> final_w;
  for (const auto& f : sm.facets) final_w.push_back(f.area * f.normal);
  out.residual = residual_of(apply_cofactor(final_w, out.transform));
  out.iterations = it;
  out.converged = out.residual <= tol;
  return out;
}

PositionResult msa_transform_strict(const ConvexBody& polytope, double tol, int max_iter) {
  auto res = msa_transform(polytope, tol, max_iter);
  require(res.converged, Errc::NoConvergence,
          "msa_transform: residual " + std::to_string(res.residual) + " above tolerance");
  return res;
}

double shadow_volume(const SurfaceMeasure& sm, const Vector& theta) {
  double v = 0.0;
  for (const auto& f : sm.facets) v += f.area * std::abs(f.normal.dot(theta));
  return 0.5 * v;
}

ShadowRatio shadow_surface_ratio(const SurfaceMeasure& sm, Eigen::Index d, std::size_t directions,
                                 std::uint64_t seed) {
  ShadowRatio best{0.0, Vector::Unit(d, 0)};
  auto consider = [&](const Vector& theta) {
    const double r = sm.total_area / shadow_volume(sm, theta);
    if (r > best.max_ratio) best = {r, theta};
  };
  for (Eigen::Index i = 0; i < d; ++i) consider(Vector::Unit(d, i));
  Rng rng(seed, "shadow-directions");
  for (std::size_t i = 0; i < directions; ++i) consider(rng.unit_vector(d));
  return best;
}

ShadowRatio shadow_surface_ratio(const ConvexBody& polytope, std::size_t directions,
                                 std::uint64_t seed) {
  return shadow_surface_ratio(surface_measure(polytope), polytope.dim(), directions, seed);
}

Vector sample_boundary(const SurfaceMeasure& sm, Rng& rng) {
  double target = rng.uniform() * sm.total_area;
  std::size_t k = 0;
  for (; k + 1 < sm.facets.size(); ++k) {
    if (target < sm.facets[k].area) break;
    target -= sm.facets[k].area;
  }
  const auto& poly = sm.facets[k].vertices;
  if (poly.size() == 2) {
    const double s = rng.uniform();
    return poly[0] + s * (poly[1] - poly[0]);
  }
  // Fan triangulation of the (convex) facet polygon.
  std::vector<double> tri_area;
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const Eigen::Vector3d a(poly[i][0] - poly[0][0], poly[i][1] - poly[0][1], poly[i][2] - poly[0][2]);
    const Eigen::Vector3d b(poly[i + 1][0] - poly[0][0], poly[i + 1][1] - poly[0][1],
                            poly[i + 1][2] - poly[0][2]);
    tri_area.push_back(0.5 * a.cross(b).norm());
    sum += tri_area.back();
  }
  double pick = rng.uniform() * sum;
  std::size_t t = 0;
  for (; t + 1 < tri_area.size(); ++t) {
    if (pick < tri_area[t]) break;
    pick -= tri_area[t];
  }
  double r1 = std::sqrt(rng.uniform());
  const double r2 = rng.uniform();
  return (1.0 - r1) * poly[0] + r1 * (1.0 - r2) * poly[t + 1] + r1 * r2 * poly[t + 2];
}

}  // namespace bcolab
