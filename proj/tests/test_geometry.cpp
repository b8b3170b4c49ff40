#include "bcolab/body.hpp"
#include "bcolab/geometry.hpp"
#include "bcolab/hull.hpp"
#include "bcolab/instances.hpp"
#include "bcolab/random.hpp"
#include "doctest.h"
#include "support.hpp"

#include <cmath>

using namespace bcolab;
using testing::errc_of;
using testing::vec;

namespace {

ConvexBody unit_disc() { return ConvexBody::ball(vec({0, 0}), 1.0); }
ConvexBody square() { return ConvexBody::box(vec({-1, -1}), vec({1, 1})); }

// Closed-form ratio for the unit disc seen from (3, 0) along the fibre z = (0, s).
double disc_psi(double s) {
  const Vector x = vec({3, 0});
  const Vector far = vec({-std::sqrt(1 - s * s), s});
  const Vector u = far - x;
  const double a = u.squaredNorm(), b = 2 * x.dot(u), c = x.squaredNorm() - 1;
  const double t0 = (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
  return 1.0 - t0;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("ray_clip on disc and square") {
    const auto iv = ray_clip(unit_disc(), vec({3, 0}), vec({-1, 0}));
    CHECK(iv.t_in == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(iv.t_out == doctest::Approx(4.0).epsilon(1e-14));

    const Vector diag = vec({1, 1}) / std::sqrt(2.0);
    const auto sq = ray_clip(square(), vec({0, 0}), diag);
    CHECK(sq.t_in == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
    CHECK(sq.t_out == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    CHECK(errc_of([] { ray_clip(unit_disc(), vec({3, 0}), vec({0, 1})); }) == Errc::NoIntersection);
  }

  TEST_CASE("ray_clip on a level-set wrapper matches the ellipsoid") {
    const auto g = ConvexFunction::isotropic_quadratic(vec({0, 0}), 1.0, 0.0);
    const auto k = ConvexBody::level_set(g, 1.0, vec({0, 0}), vec({-2, -2}), vec({2, 2}));
    const Vector u = vec({0.6, 0.8});
    const auto a = ray_clip(k, vec({0.1, -0.2}), u);
    const auto b = ray_clip(unit_disc(), vec({0.1, -0.2}), u);
    CHECK(std::abs(a.t_in - b.t_in) < 1e-10);
    CHECK(std::abs(a.t_out - b.t_out) < 1e-10);
  }

  TEST_CASE("project onto x-perp") {
    CHECK((project(vec({1, 0}), vec({2, 3})) - vec({0, 3})).norm() < 1e-15);
    CHECK((project(vec({1, 0}), vec({0, 3})) - vec({0, 3})).norm() < 1e-15);
    const Vector x = vec({1, 1}) / std::sqrt(2.0);
    CHECK((project(x, vec({1, 0})) - vec({0.5, -0.5})).norm() < 1e-15);
    CHECK(errc_of([] { project(vec({0, 0}), vec({1, 0})); }) == Errc::ZeroDirection);
  }

  TEST_CASE("in_shadow") {
    CHECK(in_shadow(unit_disc(), vec({3, 0}), vec({0, 0.5})));
    CHECK_FALSE(in_shadow(unit_disc(), vec({3, 0}), vec({0, 2})));
    CHECK(in_shadow(square(), vec({5, 0}), vec({0, 1})));
    CHECK(errc_of([] { in_shadow(unit_disc(), vec({0.5, 0}), vec({0, 0})); }) == Errc::XInsideBody);
  }

  TEST_CASE("pi_far") {
    CHECK((pi_far(unit_disc(), vec({3, 0}), vec({0, 0})) - vec({-1, 0})).norm() < 1e-14);
    CHECK((pi_far(square(), vec({5, 0}), vec({0, 0.5})) - vec({-1, 0.5})).norm() < 1e-14);
    CHECK((pi_far(unit_disc(), vec({3, 0}), vec({0, 1})) - vec({0, 1})).norm() < 1e-7);
  }

  TEST_CASE("psi_point closed forms") {
    CHECK(psi_point(unit_disc(), vec({3, 0}), vec({0, 0})) == doctest::Approx(0.5).epsilon(1e-14));
    const auto big = ConvexBody::ball(vec({0, 0}), 2.0);
    CHECK(psi_point(big, vec({6, 0}), vec({0, 0})) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(psi_point(unit_disc(), vec({3, 0}), vec({0, 1})) == doctest::Approx(0.2).epsilon(1e-12));
    for (double s : {-0.9, -0.3, 0.2, 0.7, 1.0})
      CHECK(psi_point(unit_disc(), vec({3, 0}), vec({0, s})) == doctest::Approx(disc_psi(s)).epsilon(1e-12));
  }

  TEST_CASE("psi_avg one-dimensional case is exact") {
    const auto k = ConvexBody::interval(-1, 1);
    const auto r = psi_avg(k, vec({3}), 16, 1);
    CHECK(r.avg_value == 0.5);
    CHECK(r.max_value == r.avg_value);
  }

  TEST_CASE("psi_avg on the disc matches quadrature") {
    const int grid = 200000;
    double quad = 0;
    for (int i = 0; i < grid; ++i) quad += disc_psi(-1.0 + (i + 0.5) * 2.0 / grid);
    quad /= grid;
    const auto r = psi_avg(unit_disc(), vec({3, 0}), 20000, 11);
    CHECK(std::abs(r.avg_value - quad) <= 3 * r.mc_stderr);

    const auto again = psi_avg(unit_disc(), vec({3, 0}), 20000, 11);
    CHECK(again.avg_value == r.avg_value);
    CHECK(again.max_value == r.max_value);
  }

  TEST_CASE("psi_max") {
    CHECK(psi_max(unit_disc(), vec({3, 0}), 4096, 3) == doctest::Approx(0.5).epsilon(1e-6));
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
      const auto k = instances::random_polytope(2 + t % 2, rng);
      const Vector x = instances::random_outside_point(k, rng);
      const auto r = psi_avg(k, x, 4096, rng.next_u64());
      CHECK(r.max_value <= static_cast<double>(k.dim()) * r.avg_value + 3 * r.mc_stderr * k.dim());
    }
  }

  TEST_CASE("invariance under a linear bijection") {
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
      const Eigen::Index d = 2 + t % 2;
      const auto k = instances::random_polytope(d, rng);
      const Vector x = instances::random_outside_point(k, rng);
      const Matrix tm = instances::random_linear(d, rng, 0.3, 3.0);
      ShadowSampler sampler(k, x);
      const Vector z = sampler.sample(rng);
      const Vector tx = tm * x;
      const double a = psi_point(k, x, z);
      const double b = psi_point(k.transformed(tm), tx, project(tx, tm * z));
      CHECK(std::abs(a - b) <= 1e-9);
    }
  }

  TEST_CASE("3-D hull of box-clipped points stays consistent") {
    // Many points on the faces of a cube plus interior noise.
    Rng rng(4);
    std::vector<Vector> pts;
    for (int i = 0; i < 600; ++i) {
      Vector p = rng.uniform_box(Vector::Constant(3, -1), Vector::Constant(3, 1));
      if (i % 2 == 0) p[static_cast<Eigen::Index>(rng.index(3))] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      pts.push_back(p);
    }
    const auto hull = hull3d(pts);
    CHECK(hull.faces.size() <= 2 * pts.size());
    const auto body = ConvexBody::from_vertices(pts);
    for (const auto& p : pts) CHECK(body.contains(p, 1e-9));
    CHECK(body.contains(vec({0, 0, 0})));
    CHECK_FALSE(body.contains(vec({1.01, 0, 0})));
  }

  TEST_CASE("matrix determinant lemma") {
    Rng rng(21);
    for (int t = 0; t < 100; ++t) {
      const Matrix a = instances::random_linear(3, rng, 0.5, 2.0);
      const Vector u = rng.normal_vector(3), v = rng.normal_vector(3);
      const double lhs = (a + u * v.transpose()).determinant();
      const double rhs = a.determinant() * (1.0 + v.dot(a.inverse() * u));
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }

  TEST_CASE("polytope invariants") {
    CHECK(errc_of([] {
            ConvexBody::polytope({{vec({1, 0}), 1.0}, {vec({-1, 0}), 1.0}});
          }) == Errc::Unbounded);
    const auto b = square().transformed(Matrix::Identity(2, 2) * 2.0);
    CHECK(b.contains(vec({1.9, -1.9})));
    CHECK_FALSE(b.contains(vec({2.1, 0})));
  }
}
