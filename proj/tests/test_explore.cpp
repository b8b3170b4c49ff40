#include "bcolab/body.hpp"
#include "bcolab/explore.hpp"
#include "bcolab/minimize.hpp"
#include "bcolab/msa.hpp"
#include "doctest.h"
#include "support.hpp"

#include <cmath>

using namespace bcolab;
using testing::errc_of;
using testing::vec;

namespace {

ConvexFunction bowl(Eigen::Index d, double offset = 0.0) {
  return ConvexFunction::isotropic_quadratic(Vector::Zero(d), 1.0, offset).with_minimum(Vector::Zero(d), offset);
}

ConvexBody unit_box(Eigen::Index d) { return ConvexBody::box(Vector::Constant(d, -1), Vector::Constant(d, 1)); }

}  // namespace

TEST_SUITE("explore") {
  TEST_CASE("level set of a round bowl") {
    const auto ball = ConvexBody::ball(vec({0, 0}), 1.0);
    const auto k = level_set(bowl(2), 0.04, 64, &ball);
    REQUIRE(k.vertices().size() == 64);
    for (const auto& v : k.vertices()) CHECK(std::abs(v.norm() - 0.2) < 1e-9);
  }

  TEST_CASE("level set clipped by the ambient body") {
    const auto box = unit_box(2);
    const auto k = level_set(bowl(2), 5.0, 64, &box);
    for (const auto& v : k.vertices()) CHECK(box.contains(v, 1e-12));
  }

  TEST_CASE("small level sets sit inside the strong-convexity ball") {
    const auto f = bowl(3);
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      const auto k = level_set(f, eps, 0);
      for (const auto& v : k.vertices()) CHECK(v.norm() <= std::sqrt(2 * eps / f.strong_convexity()) + 1e-15);
    }
    CHECK(errc_of([&] { level_set(f, 1e-300, 0); }) == Errc::EpsTooSmall);
  }

  TEST_CASE("epsilon grid") {
    const auto g = epsilon_grid(1, 2, 1.0);
    CHECK(g.eps0 == 1.0 / 2097152.0);
    CHECK(g.gamma == doctest::Approx(10.0 / 9.0));
    CHECK(g.levels.size() <= 140);
    CHECK(g.levels.size() >= 139);
    CHECK(g.levels.front() == g.eps0);
    CHECK(g.levels.back() <= 1.0);
    CHECK_FALSE(g.snap_down(g.eps0 * 0.5).has_value());
    CHECK(*g.snap_down(g.eps0 * 1.05) == 0);

    const auto big = epsilon_grid(1, 1, 1e6);
    REQUIRE(big.levels.size() == 1);
    CHECK(big.levels.front() == 1.0);
  }

  TEST_CASE("window constants") {
    CHECK(psi_target(2) == 1.0 / 128);
    CHECK(psi_window_low(3) == 1.0 / 384);
    CHECK(psi_window_high(1) == 1.0 / 32);
  }

  TEST_CASE("classify F0 cases") {
    const auto box = unit_box(2);
    const auto grid = epsilon_grid(2, 10, 2.0);
    const auto fbar = bowl(2);
    CHECK(classify(fbar, fbar, grid, box).tag == ClassLabel::Tag::F0);
    const auto low = bowl(2, -0.5);
    CHECK(classify(low, with_computed_minimum(ConvexFunction::isotropic_quadratic(vec({0.2, 0}), 1.0, 0.0), box),
                   grid, box)
              .tag == ClassLabel::Tag::F0);
  }

  TEST_CASE("classify F_eps case with witness in the window") {
    const auto box = unit_box(2);
    const auto fbar = bowl(2, 0.3);
    const auto f = with_computed_minimum(ConvexFunction::isotropic_quadratic(vec({0.5, 0}), 0.8, 0.0), box);
    const auto grid = epsilon_grid(2, 10, fbar.strong_convexity());
    const auto label = classify(f, fbar, grid, box);
    REQUIRE(label.tag == ClassLabel::Tag::Feps);
    CHECK(label.witness >= 1.0 / 256);
    CHECK(label.witness <= 1.0 / 64);
    CHECK(label.level <= label.epsilon);
    CHECK(label.level == grid.levels[label.level_index]);
  }

  TEST_CASE("build_rho") {
    const auto r1 = build_rho(bowl(1), 0.01, 64, 1);
    REQUIRE(r1.size() == 2);
    CHECK(std::abs(std::min(r1.support[0][0], r1.support[1][0]) + 0.1) < 1e-12);
    CHECK(std::abs(std::max(r1.support[0][0], r1.support[1][0]) - 0.1) < 1e-12);
    CHECK(r1.weights[0] == 0.5);
    CHECK(r1.weights[1] == 0.5);

    const std::size_t n = 4096;
    const auto r2 = build_rho(bowl(2), 0.01, n, 2);
    CHECK(r2.size() == n);
    const Vector mean = r2.mean();
    for (Eigen::Index i = 0; i < 2; ++i) {
      double var = 0;
      for (const auto& p : r2.support) var += (p[i] - mean[i]) * (p[i] - mean[i]);
      const double se = std::sqrt(var / (n - 1) / n);
      CHECK(std::abs(mean[i]) <= 3 * se);
    }
    for (const auto& p : r2.support) CHECK(std::abs(p.norm() - 0.1) < 2e-3);
  }

  TEST_CASE("combine") {
    const auto a = FiniteMeasure::dirac(vec({1, 0})), b = FiniteMeasure::dirac(vec({0, 1}));
    const auto one = combine({a}, {1.0});
    CHECK(one.support == a.support);
    CHECK(one.weights == a.weights);
    const auto mix = combine({a, b}, {0.3, 0.7});
    REQUIRE(mix.size() == 2);
    CHECK(mix.weights[0] == 0.3);
    CHECK(mix.weights[1] == 0.7);
    CHECK(mix.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(errc_of([&] { combine({a, b}, {0.3, 0.6}); }) == Errc::MassMismatch);
  }

  TEST_CASE("check_inf and fit_beta") {
    const auto fbar = bowl(2);
    const double alpha = 0.1;
    const double self = check_inf(fbar, FunctionMeasure::dirac(fbar), FiniteMeasure::dirac(vec({0, 0})), alpha, 4.0);
    CHECK(self == doctest::Approx(alpha).epsilon(1e-15));
    const double forced = check_inf(fbar, FunctionMeasure::dirac(fbar), FiniteMeasure::dirac(vec({1, 0})), alpha, 0.0);
    CHECK(forced < 0.0);

    CHECK(fit_beta(InfTerms{0.05, 1.0}, alpha) == 0.0);
    const double b1 = fit_beta(InfTerms{0.5, 0.2}, alpha);
    const double b2 = fit_beta(InfTerms{0.5, 0.8}, alpha);
    CHECK(b1 / b2 == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(errc_of([&] { fit_beta(InfTerms{0.5, 0.0}, alpha); }) == Errc::ZeroVariance);

    const auto no_min = ConvexFunction::isotropic_quadratic(vec({0, 0}), 1.0, 0.0);
    CHECK(errc_of([&] {
            check_inf(fbar, FunctionMeasure::dirac(no_min), FiniteMeasure::dirac(vec({0, 0})), alpha, 1.0);
          }) == Errc::MissingMinValue);
  }

  TEST_CASE("explore pipeline on a seeded instance") {
    const auto box = unit_box(2);
    FunctionMeasure mu;
    std::vector<std::pair<double, ConvexFunction>> parts;
    const std::vector<Vector> centers = {vec({0.6, 0.1}), vec({-0.5, 0.4}), vec({0.0, -0.6})};
    for (const auto& c : centers) {
      const auto f = ConvexFunction::isotropic_quadratic(c, 1.0, 0.0);
      mu.atoms.push_back(with_computed_minimum(f, box));
      mu.weights.push_back(1.0 / 3);
      parts.emplace_back(1.0 / 3, f);
    }
    const auto fbar = with_computed_minimum(ConvexFunction::sum(parts), box);
    const auto grid = epsilon_grid(2, 10, fbar.strong_convexity());
    ExploreOptions opts;
    opts.classify.seed = 5;
    const auto e = explore(fbar, mu, grid, box, opts);
    CHECK(e.labels.size() == 3);
    CHECK(e.rho.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const double alpha = 0.1;
    const double beta = fit_beta(fbar, mu, e.rho, alpha);
    CHECK(std::isfinite(beta));
    CHECK(check_inf(fbar, mu, e.rho, alpha, beta) >= -1e-12);
  }
}
