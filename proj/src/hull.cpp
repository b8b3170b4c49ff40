#include "bcolab/hull.hpp"

#include "bcolab/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace bcolab {

namespace {

double cross2(const Vector& o, const Vector& a, const Vector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double extent(const std::vector<Vector>& points) {
  double s = 0.0;
  for (const auto& p : points) s = std::max(s, p.cwiseAbs().maxCoeff());
  return std::max(s, 1e-300);
}

Eigen::Vector3d v3(const Vector& v) { return {v[0], v[1], v[2]}; }

struct Face {
  std::array<int, 3> idx;
  Eigen::Vector3d normal;
  double offset;
  bool alive = true;
};

Face make_face(const std::vector<Eigen::Vector3d>& p, int a, int b, int c) {
  Eigen::Vector3d n = (p[b] - p[a]).cross(p[c] - p[a]);
  const double len = n.norm();
  if (len > 0.0) n /= len;
  return Face{{a, b, c}, n, n.dot(p[a])};
}

}  // namespace

std::vector<Vector> hull2d(std::vector<Vector> points) {
  require(!points.empty(), Errc::InvalidArgument, "hull2d: no points");
  std::sort(points.begin(), points.end(), [](const Vector& a, const Vector& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  const double tol = 1e-14 * extent(points) * extent(points);
  std::vector<Vector> h(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= tol) --k;
    h[k++] = p;
  }
  for (std::size_t i = points.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], points[i]) <= tol) --k;
    h[k++] = points[i];
  }
  h.resize(k > 1 ? k - 1 : k);
  return h;
}

Hull3 hull3d(const std::vector<Vector>& input) {
  const int n = static_cast<int>(input.size());
  require(n >= 4, Errc::InvalidArgument, "hull3d: need at least 4 points");
  std::vector<Eigen::Vector3d> p;
  p.reserve(input.size());
  for (const auto& v : input) p.push_back(v3(v));
  const double eps = 1e-10 * extent(input);

  // Initial non-degenerate tetrahedron.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  double best = 0.0;
  for (int i = 1; i < n; ++i) {
    const double dd = (p[i] - p[i0]).norm();
    if (dd > best) best = dd, i1 = i;
  }
  require(i1 >= 0 && best > eps, Errc::InvalidArgument, "hull3d: points coincide");
  best = 0.0;
  const Eigen::Vector3d axis = (p[i1] - p[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d r = p[i] - p[i0];
    const double dd = (r - r.dot(axis) * axis).norm();
    if (dd > best) best = dd, i2 = i;
  }
  require(i2 >= 0 && best > eps, Errc::InvalidArgument, "hull3d: points collinear");
  const Eigen::Vector3d pn = (p[i1] - p[i0]).cross(p[i2] - p[i0]).normalized();
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dd = std::abs((p[i] - p[i0]).dot(pn));
    if (dd > best) best = dd, i3 = i;
  }
  require(i3 >= 0 && best > eps, Errc::InvalidArgument, "hull3d: points coplanar");

  // Quickhull: faces keep their neighbours across each edge (idx[e], idx[e+1])
  // and the input points strictly above them.
  std::vector<Face> faces;
  std::vector<std::array<int, 3>> nb;
  std::vector<std::vector<int>> outside;
  auto dist = [&](int f, int i) { return faces[f].normal.dot(p[i]) - faces[f].offset; };
  auto add_face = [&](int a, int b, int c) {
    faces.push_back(make_face(p, a, b, c));
    nb.push_back({-1, -1, -1});
    outside.emplace_back();
    return static_cast<int>(faces.size()) - 1;
  };
  auto edge_slot = [&](int f, int a) {
    for (int e = 0; e < 3; ++e)
      if (faces[f].idx[e] == a) return e;
    return -1;
  };

  const Eigen::Vector3d centroid = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
  const std::array<std::array<int, 3>, 4> tet{{{i0, i1, i2}, {i0, i1, i3}, {i0, i2, i3}, {i1, i2, i3}}};
  for (auto t : tet) {
    Face f = make_face(p, t[0], t[1], t[2]);
    if (f.normal.dot(centroid) - f.offset > 0.0) std::swap(t[1], t[2]);
    add_face(t[0], t[1], t[2]);
  }
  for (int f = 0; f < 4; ++f)
    for (int e = 0; e < 3; ++e) {
      const int a = faces[f].idx[e], b = faces[f].idx[(e + 1) % 3];
      for (int g = 0; g < 4; ++g) {
        if (g == f) continue;
        const int s = edge_slot(g, b);
        if (s >= 0 && faces[g].idx[(s + 1) % 3] == a) nb[f][e] = g;
      }
    }

  auto assign = [&](int i, const std::vector<int>& candidates) {
    int arg = -1;
    double far = eps;
    for (int f : candidates) {
      const double dd = dist(f, i);
      if (dd > far) far = dd, arg = f;
    }
    if (arg >= 0) outside[arg].push_back(i);
  };
  const std::vector<int> initial{0, 1, 2, 3};
  for (int i = 0; i < n; ++i)
    if (i != i0 && i != i1 && i != i2 && i != i3) assign(i, initial);

  std::vector<int> stack{0, 1, 2, 3};
  std::vector<int> mark;
  int stamp = 0;
  while (!stack.empty()) {
    const int f0 = stack.back();
    stack.pop_back();
    if (!faces[f0].alive || outside[f0].empty()) continue;
    int apex = outside[f0].front();
    for (int i : outside[f0])
      if (dist(f0, i) > dist(f0, apex)) apex = i;

    // Visible region by flood fill from f0, horizon as (a, b, neighbour).
    ++stamp;
    mark.resize(faces.size(), 0);
    std::vector<int> visible{f0};
    std::vector<std::array<int, 3>> horizon;
    mark[f0] = stamp;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const int f = visible[k];
      for (int e = 0; e < 3; ++e) {
        const int g = nb[f][e];
        if (mark[g] == stamp) continue;
        if (dist(g, apex) > eps) {
          mark[g] = stamp;
          visible.push_back(g);
        }
      }
    }
    for (int f : visible)
      for (int e = 0; e < 3; ++e)
        if (mark[nb[f][e]] != stamp) horizon.push_back({faces[f].idx[e], faces[f].idx[(e + 1) % 3], nb[f][e]});

    std::vector<int> orphans;
    for (int f : visible) {
      faces[f].alive = false;
      orphans.insert(orphans.end(), outside[f].begin(), outside[f].end());
      outside[f].clear();
    }

    std::vector<int> created;
    std::vector<int> by_start(static_cast<std::size_t>(n), -1);
    for (const auto& [a, b, g] : horizon) {
      require(by_start[a] < 0, Errc::InvalidArgument, "hull3d: horizon is not a simple cycle");
      const int f = add_face(a, b, apex);
      nb[f][0] = g;
      nb[g][edge_slot(g, b)] = f;
      by_start[a] = f;
      created.push_back(f);
    }
    for (int f : created) {
      const int b = faces[f].idx[1];
      const int next = by_start[b];  // face (b, c, apex) shares edge (apex, b)
      require(next >= 0, Errc::InvalidArgument, "hull3d: horizon is not closed");
      nb[f][1] = next;
      nb[next][2] = f;
    }
    for (int i : orphans)
      if (i != apex) assign(i, created);
    for (int f : created)
      if (!outside[f].empty()) stack.push_back(f);
  }

  Hull3 out;
  out.points = input;
  for (const auto& f : faces)
    if (f.alive) out.faces.push_back(f.idx);
  return out;
}

PolytopeRep polytope_from_points(const std::vector<Vector>& points) {
  require(!points.empty(), Errc::InvalidArgument, "polytope_from_points: no points");
  const auto d = points.front().size();
  PolytopeRep rep;
  if (d == 1) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : points) lo = std::min(lo, p[0]), hi = std::max(hi, p[0]);
    require(hi > lo, Errc::InvalidArgument, "polytope_from_points: empty interior");
    rep.halfspaces = {{Vector::Constant(1, 1.0), hi}, {Vector::Constant(1, -1.0), -lo}};
    rep.vertices = {Vector::Constant(1, lo), Vector::Constant(1, hi)};
    return rep;
  }
  if (d == 2) {
    rep.vertices = hull2d(points);
    require(rep.vertices.size() >= 3, Errc::InvalidArgument,
            "polytope_from_points: empty interior");
    const std::size_t k = rep.vertices.size();
    for (std::size_t i = 0; i < k; ++i) {
      const Vector& a = rep.vertices[i];
      const Vector& b = rep.vertices[(i + 1) % k];
      Vector nrm(2);
      nrm << b[1] - a[1], a[0] - b[0];
      nrm.normalize();
      rep.halfspaces.push_back({nrm, nrm.dot(a)});
    }
    return rep;
  }
  require(d == 3, Errc::InvalidArgument, "polytope_from_points: dimension must be <= 3");
  const Hull3 hull = hull3d(points);
  const double scale = extent(points);
  std::vector<int> used(points.size(), 0);
  for (const auto& f : hull.faces) {
    for (int idx : f) used[idx] = 1;
    const Eigen::Vector3d a = v3(points[f[0]]);
    Eigen::Vector3d nrm = (v3(points[f[1]]) - a).cross(v3(points[f[2]]) - a).normalized();
    const double off = nrm.dot(a);
    bool merged = false;
    for (const auto& h : rep.halfspaces) {
      if ((h.normal - Vector(nrm)).norm() < 1e-9 && std::abs(h.offset - off) < 1e-9 * scale) {
        merged = true;
        break;
      }
    }
    if (!merged) rep.halfspaces.push_back({Vector(nrm), off});
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    if (used[i]) rep.vertices.push_back(points[i]);
  return rep;
}

std::vector<Vector> enumerate_vertices(const std::vector<Halfspace>& hs, Eigen::Index d,
                                       double tol) {
  require(d >= 1 && d <= 3, Errc::InvalidArgument, "enumerate_vertices: d must be <= 3");
  const int m = static_cast<int>(hs.size());
  std::vector<Vector> verts;
  auto feasible = [&](const Vector& x) {
    for (const auto& h : hs)
      if (h.normal.dot(x) - h.offset > tol) return false;
    return true;
  };
  auto consider = [&](const std::vector<int>& idx) {
    Matrix a(d, d);
    Vector b(d);
    for (Eigen::Index r = 0; r < d; ++r) {
      a.row(r) = hs[idx[r]].normal.transpose();
      b[r] = hs[idx[r]].offset;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < d) return;
    const Vector x = lu.solve(b);
    if (!x.allFinite() || !feasible(x)) return;
    for (const auto& v : verts)
      if ((v - x).norm() <= tol) return;
    verts.push_back(x);
  };
  std::vector<int> idx(static_cast<std::size_t>(d));
  if (d == 1) {
    for (int i = 0; i < m; ++i) consider({i});
  } else if (d == 2) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) consider({i, j});
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        for (int k = j + 1; k < m; ++k) consider({i, j, k});
  }
  return verts;
}

std::optional<Vector> maximize_linear(const std::vector<Halfspace>& hs, const Vector& c) {
  const auto verts = enumerate_vertices(hs, c.size());
  if (verts.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < verts.size(); ++i)
    if (c.dot(verts[i]) > c.dot(verts[best])) best = i;
  return verts[best];
}

double planar_polygon_area(const std::vector<Vector>& points, const Vector& normal) {
  if (points.size() < 3) return 0.0;
  Matrix basis = orthonormal_complement(normal);
  std::vector<Vector> flat;
  flat.reserve(points.size());
  for (const auto& p : points) flat.push_back(basis.transpose() * p);
  const auto poly = hull2d(flat);
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vector& a = poly[i];
    const Vector& b = poly[(i + 1) % poly.size()];
    area += a[0] * b[1] - a[1] * b[0];
  }
  return 0.5 * std::abs(area);
}

}  // namespace bcolab
