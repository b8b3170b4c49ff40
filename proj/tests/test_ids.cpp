#include "bcolab/body.hpp"
#include "bcolab/ids_bandit.hpp"
#include "bcolab/serialize.hpp"
#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <sstream>

using namespace bcolab;
using namespace bcolab::ids;
using testing::errc_of;
using testing::vec;

namespace {

// Stationary table over `k` cover points from explicit rows.
LossTable table_of(const std::vector<std::vector<double>>& rows) {
  LossTable t;
  for (const auto& r : rows) {
    Matrix m(1, static_cast<Eigen::Index>(r.size()));
    for (std::size_t j = 0; j < r.size(); ++j) m(0, static_cast<Eigen::Index>(j)) = r[j];
    Eigen::Index best = 0;
    m.row(0).minCoeff(&best);
    t.values.push_back(m);
    t.ystar.push_back(static_cast<std::size_t>(best));
  }
  return t;
}

long double bound_reference(long double n, long double d, long double alpha, long double beta, long double diam) {
  const long double s = std::max(1.0L, std::sqrt(2 * beta));
  return 3 + n * alpha + std::sqrt(beta * d * n * std::log(3 * n * n * s * diam));
}

}  // namespace

TEST_SUITE("ids") {
  TEST_CASE("cover of an interval") {
    const auto k = ConvexBody::interval(-1, 1);
    const auto c = build_cover(k, 0.5);
    REQUIRE(c.size() == 5);
    CHECK(c.log_size_bound(2.0) == doctest::Approx(std::log(12.0)).epsilon(1e-15));
    CHECK(c.project(vec({0.2})) == 2);
    CHECK(c.project(vec({0.25})) == 2);

    const auto one = build_cover(k, 3.0);
    CHECK(one.size() == 1);
    CHECK(errc_of([&] { build_cover(k, 1e-6, 1000); }) == Errc::CoverTooLarge);
  }

  TEST_CASE("cover of the unit square is a radius net") {
    const auto sq = ConvexBody::box(vec({0, 0}), vec({1, 1}));
    const double r = 0.1;
    const auto c = build_cover(sq, r);
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
      const Vector p = rng.uniform_box(vec({0, 0}), vec({1, 1}));
      CHECK((c.points[c.project(p)] - p).norm() <= r + 1e-12);
    }
    for (const auto& p : c.points) CHECK(sq.contains(p, 1e-12));
  }

  TEST_CASE("lifted losses") {
    const auto zero = ConvexFunction::isotropic_quadratic(vec({0}), 0.0, 0.0);
    const auto g = lift_loss(zero, 9, 2.0);
    for (double x : {-1.0, -0.3, 0.0, 0.8}) CHECK(g(vec({x})) == doctest::Approx(x * x / 40).epsilon(1e-15));
    const auto one = ConvexFunction::isotropic_quadratic(vec({0}), 0.0, 1.0);
    const auto h = lift_loss(one, 9, 2.0);
    for (double x : {-1.0, 0.0, 1.0}) CHECK(h(vec({x})) <= 1.0);
    CHECK(lifted_modulus(9, 2.0) == doctest::Approx(1.0 / 40).epsilon(1e-15));
  }

  TEST_CASE("shrink_domain") {
    const auto iv = shrink_domain(ConvexBody::interval(-1, 1), 10);
    CHECK(iv.bbox_lo()[0] == doctest::Approx(-0.9).epsilon(1e-15));
    CHECK(iv.bbox_hi()[0] == doctest::Approx(0.9).epsilon(1e-15));
    const auto b = shrink_domain(ConvexBody::ball(vec({0, 0}), 1.0), 4);
    CHECK(b.contains(vec({0.749, 0})));
    CHECK_FALSE(b.contains(vec({0.751, 0})));
    CHECK(errc_of([] { shrink_domain(ConvexBody::interval(-1, 1), 1); }) == Errc::EmptyInset);
  }

  TEST_CASE("lift audit passes on random atoms") {
    const auto dom = ConvexBody::interval(-1, 1);
    const int n = 50;
    const auto inset = shrink_domain(dom, n);
    Rng rng(12);
    for (int i = 0; i < 4; ++i) {
      const auto audit = audit_lift(random_prior_atom(rng, dom, n), inset, n, 2000, rng.next_u64());
      CHECK(audit.worst_secant_margin >= -1e-14);
      CHECK(audit.max_gradient <= n);
    }
  }

  TEST_CASE("posterior update") {
    const auto t = table_of({{0.1, 0.5, 0.9}, {0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}});
    const std::vector<double> w = {0.5, 0.25, 0.25};
    const auto same = posterior_update(w, t, 0, 0, 0.1);
    CHECK(same[0] == doctest::Approx(2.0 / 3));
    CHECK(same[1] == doctest::Approx(1.0 / 3));
    CHECK(same[2] == 0.0);
    const auto solo = posterior_update(w, t, 0, 2, 0.6);
    CHECK(solo == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(errc_of([&] { posterior_update(w, t, 0, 1, 0.77); }) == Errc::EmptyPosterior);
    CHECK(entropy({0.5, 0.5}) == doctest::Approx(std::log(2.0)));
    CHECK(entropy(solo) == 0.0);
  }

  TEST_CASE("posterior stats") {
    const auto one = table_of({{0.3, 0.1, 0.4}});
    const auto s1 = posterior_stats({1.0}, one, 0);
    REQUIRE(s1.groups.size() == 1);
    CHECK(s1.optimal_loss == doctest::Approx(0.1));
    CHECK(s1.tower_error <= 1e-12);

    const auto shared = table_of({{0.3, 0.1, 0.4}, {0.5, 0.2, 0.9}});
    const auto s2 = posterior_stats({0.5, 0.5}, shared, 0);
    REQUIRE(s2.groups.size() == 1);
    CHECK(s2.groups[0].mass == doctest::Approx(1.0));
    CHECK(s2.optimal_loss == doctest::Approx(0.15));

    const auto split = table_of({{0.3, 0.1, 0.4}, {0.5, 0.7, 0.2}});
    const auto s3 = posterior_stats({0.4, 0.6}, split, 0);
    CHECK(s3.groups.size() == 2);
    CHECK(s3.tower_error <= 1e-12);
    CHECK(s3.fbar[1] == doctest::Approx(0.4 * 0.1 + 0.6 * 0.7));
  }

  TEST_CASE("ids_opt") {
    const auto dirac = ids_opt(posterior_stats({1.0}, table_of({{0.3, 0.1, 0.4}}), 0));
    CHECK(dirac.delta == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(dirac.v == 0.0);

    const auto s = posterior_stats({0.5, 0.5}, table_of({{0.0, 0.5, 1.0}, {1.0, 0.5, 0.0}}), 0);
    const auto xi = ids_opt(s);
    CHECK_FALSE(xi.zero_information);
    CHECK(xi.v > 0.0);
    const double ratio = xi.delta * xi.delta / xi.v;
    CHECK(std::isfinite(ratio));
    for (std::size_t a = 0; a < 3; ++a) {
      const auto pure = evaluate(s, {a}, {1.0});
      if (pure.v > 0) CHECK(ratio <= pure.delta * pure.delta / pure.v + 1e-12);
    }
  }

  TEST_CASE("ids_opt on large covers beats sampled mixtures") {
    Rng rng(31);
    const std::size_t k = 1500;
    std::vector<std::vector<double>> rows(4, std::vector<double>(k));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      const double c = rng.uniform(-1, 1), s = rng.uniform(0.2, 1.0);
      for (std::size_t j = 0; j < k; ++j) {
        const double x = -1.0 + 2.0 * static_cast<double>(j) / (k - 1);
        rows[a][j] = s * (x - c) * (x - c) + 0.01 * rng.uniform();
      }
    }
    const auto s = posterior_stats({0.1, 0.2, 0.3, 0.4}, table_of(rows), 0);
    const auto xi = ids_opt(s);
    REQUIRE(xi.v > 0.0);
    const double best = xi.delta * xi.delta / xi.v;
    for (int t = 0; t < 20000; ++t) {
      const std::size_t a = rng.index(k), b = rng.index(k);
      const double q = rng.uniform();
      const auto mix = a == b ? evaluate(s, {a}, {1.0}) : evaluate(s, {a, b}, {q, 1.0 - q});
      if (mix.v > 0.0) CHECK(best <= mix.delta * mix.delta / mix.v * (1 + 1e-12));
    }
  }

  TEST_CASE("episodes") {
    const auto dom = ConvexBody::interval(-1, 1);
    const int n = 30;
    auto prior = quadratic_prior(dom, 2, n, 4);
    const auto cover = build_cover(dom, 0.01);
    EpisodeConfig cfg;
    cfg.n = n;

    Prior single;
    single.atoms = {prior.atoms[0]};
    single.weights = {1.0};
    const auto t1 = run_episode(single, cover, dom, cfg, 1);
    CHECK(t1.regret == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t1.rows.size() == static_cast<std::size_t>(n));

    const auto t2 = run_episode(prior, cover, dom, cfg, 2);
    CHECK(t2.support_final == 1);
    CHECK(t2.rows[1].entropy == 0.0);
    CHECK(t2.max_tower_error <= 1e-12);

    std::ostringstream a, b;
    write_trace_csv(a, t2);
    write_trace_csv(b, run_episode(prior, cover, dom, cfg, 2));
    CHECK(a.str() == b.str());
  }

  TEST_CASE("regret bound") {
    CHECK(regret_bound(100, 1, 0, 0, 2) == 3.0);
    for (auto [n, d, a, b, diam] : std::vector<std::tuple<double, double, double, double, double>>{
             {200, 1, 0.005, 2.0, 2.0}, {1000, 3, 0.001, 0.7, 5.0}, {50, 2, 0.02, 0.1, 1.0}}) {
      const double got = regret_bound(n, d, a, b, diam);
      const double want = static_cast<double>(bound_reference(n, d, a, b, diam));
      CHECK(std::abs(got - want) <= 1e-12 * want);
    }
    CHECK(regret_bound(200, 1, 0.005, 2.0, 2.0) == doctest::Approx(76.32).epsilon(1e-3));
    CHECK(regret_bound(400, 1, 0.005, 2.0, 2.0) > regret_bound(200, 1, 0.005, 2.0, 2.0));
    CHECK(regret_bound(200, 2, 0.005, 2.0, 2.0) > regret_bound(200, 1, 0.005, 2.0, 2.0));
    CHECK(regret_bound(200, 1, 0.005, 3.0, 2.0) > regret_bound(200, 1, 0.005, 2.0, 2.0));
    CHECK(cover_regret_bound(100, 0.01, 0, 50) == 3.0);
    CHECK(parse_mode("ids-opt") == Mode::IdsOpt);
    CHECK(errc_of([] { parse_mode("greedy"); }) == Errc::InvalidArgument);
  }

  TEST_CASE("serialization round trips") {
    const auto box = ConvexBody::box(vec({-1, 0}), vec({2, 1}));
    const auto back = body_from_json(to_json(box));
    CHECK(back.contains(vec({1.9, 0.9})));
    CHECK_FALSE(back.contains(vec({2.1, 0.5})));
    Matrix shape(2, 2);
    shape << 2, 0.5, 0.5, 1;
    const auto e = body_from_json(to_json(ConvexBody::ellipsoid(vec({1, 1}), shape)));
    CHECK(e.contains(vec({1, 1})));

    FiniteMeasure m;
    m.support = {vec({1, 2}), vec({3, 4})};
    m.weights = {0.25, 0.75};
    const auto m2 = measure_from_json(to_json(m));
    CHECK(m2.support == m.support);
    CHECK(m2.weights == m.weights);
    Json bad = to_json(m);
    bad["weights"] = {0.5, 0.6};
    CHECK(errc_of([&] { measure_from_json(bad); }) == Errc::MassMismatch);
  }
}
