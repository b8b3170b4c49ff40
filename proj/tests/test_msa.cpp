#include "bcolab/body.hpp"
#include "bcolab/instances.hpp"
#include "bcolab/msa.hpp"
#include "bcolab/random.hpp"
#include "doctest.h"
#include "support.hpp"

#include <cmath>

using namespace bcolab;
using testing::vec;

namespace {

ConvexBody unit_cube(Eigen::Index d) { return ConvexBody::box(Vector::Zero(d), Vector::Ones(d)); }

ConvexBody regular_polygon(int k) {
  std::vector<Vector> pts;
  for (int i = 0; i < k; ++i) {
    const double a = 2 * M_PI * i / k;
    pts.push_back(vec({std::cos(a), std::sin(a)}));
  }
  return ConvexBody::from_vertices(pts);
}

}  // namespace

TEST_SUITE("msa") {
  TEST_CASE("surface measure of unit square and cube") {
    for (Eigen::Index d : {2, 3}) {
      const auto sm = surface_measure(unit_cube(d));
      REQUIRE(sm.facets.size() == static_cast<std::size_t>(2 * d));
      for (const auto& f : sm.facets) {
        CHECK(f.area == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.normal.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.normal.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-14));
      }
      CHECK(sm.closure_defect() < 1e-14);
    }
  }

  TEST_CASE("regular 2-simplex facet areas equal side lengths") {
    const auto tri = ConvexBody::from_vertices({vec({0, 0}), vec({1, 0}), vec({0.5, std::sqrt(3.0) / 2})});
    const auto sm = surface_measure(tri);
    REQUIRE(sm.facets.size() == 3);
    for (const auto& f : sm.facets) CHECK(f.area == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("isotropy residual") {
    CHECK(isotropy_residual(surface_measure(unit_cube(2))) < 1e-14);
    const auto box = ConvexBody::box(vec({0, 0}), vec({2, 1}));
    CHECK(isotropy_residual(surface_measure(box)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  }

  TEST_CASE("positions of cubes and boxes") {
    for (Eigen::Index d : {2, 3}) {
      const auto r = msa_transform(unit_cube(d));
      CHECK(r.converged);
      CHECK((r.transform - Matrix::Identity(d, d)).norm() <= 1e-6);
    }
    const auto box = ConvexBody::box(vec({0, 0}), vec({2, 1}));
    const auto r = msa_transform(box);
    CHECK(r.converged);
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 1 / std::sqrt(2.0);
    expect(1, 1) = std::sqrt(2.0);
    CHECK((r.transform - expect).norm() <= 1e-6);
    const auto img = surface_measure(box.transformed(r.transform));
    for (const auto& f : img.facets) CHECK(f.area == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }

  TEST_CASE("random polytopes reach isotropic position") {
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
      const auto k = instances::random_polytope(2 + t % 2, rng);
      const auto r = msa_transform(k);
      CHECK(r.residual >= 0.0);
      CHECK(r.residual <= 1e-6);
      CHECK(std::abs(r.transform.determinant() - 1.0) < 1e-9);
      CHECK((r.transform - r.transform.transpose()).norm() < 1e-12);
    }
  }

  TEST_CASE("shadow ratios") {
    CHECK(shadow_surface_ratio(unit_cube(2), 0, 1).max_ratio == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(shadow_surface_ratio(unit_cube(3), 0, 1).max_ratio == doctest::Approx(6.0).epsilon(1e-14));
    const double disc = shadow_surface_ratio(regular_polygon(256), 1000, 2).max_ratio;
    CHECK(disc == doctest::Approx(M_PI).epsilon(1e-3));
    CHECK(disc <= 4.0);
  }

  TEST_CASE("boundary samples lie on the boundary") {
    Rng rng(8);
    const auto k = instances::random_polytope(3, rng);
    const auto sm = surface_measure(k);
    for (int i = 0; i < 200; ++i) {
      const Vector p = sample_boundary(sm, rng);
      double slack = 1e300;
      for (const auto& h : k.halfspaces()) slack = std::min(slack, h.offset - h.normal.dot(p));
      CHECK(std::abs(slack) < 1e-9);
    }
  }
}
