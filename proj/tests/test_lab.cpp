#include "bcolab/error.hpp"
#include "bcolab/lemma_lab.hpp"
#include "doctest.h"
#include "support.hpp"

#include <set>
#include <sstream>

using namespace bcolab;
using namespace bcolab::lab;
using testing::errc_of;

TEST_SUITE("lab") {
  TEST_CASE("registry") {
    const auto& all = properties();
    CHECK(all.size() == 13);
    std::set<std::string> ids;
    for (const auto& p : all) {
      ids.insert(p.id);
      CHECK(p.default_trials > 0);
      CHECK_FALSE(p.summary.empty());
    }
    CHECK(ids.size() == all.size());
    for (const char* id : {"psi_invariance", "psi_concavity", "los", "key", "msa_position", "lift"})
      CHECK(ids.count(id) == 1);
    CHECK(property("los").default_trials == 10000);
    CHECK(property("key").default_trials == 200);
    CHECK(errc_of([] { property("nope"); }) == Errc::InvalidArgument);
  }

  TEST_CASE("replay reproduces a trial") {
    const auto r = run_property("psi_concavity", 20, 99);
    const auto a = replay_trial("psi_concavity", 99, r.worst_trial);
    const auto b = replay_trial("psi_concavity", 99, r.worst_trial);
    CHECK(a.worst_margin() == r.worst_margin);
    std::ostringstream sa, sb;
    print_outcome(sa, "psi_concavity", a);
    print_outcome(sb, "psi_concavity", b);
    CHECK(sa.str() == sb.str());
  }

  TEST_CASE("reports do not depend on thread count") {
    for (const char* id : {"psi_invariance", "los", "combine"}) {
      const auto one = run_property(id, 30, 5, 1);
      const auto three = run_property(id, 30, 5, 3);
      CHECK(csv_row(one) == csv_row(three));
      CHECK(one.worst_trial == three.worst_trial);
    }
  }

  TEST_CASE("tolerance override flips verdicts but not margins") {
    const auto base = run_property("psi_monotone", 10, 3);
    REQUIRE(base.passed());
    REQUIRE(base.worst_margin > 0.0);
    const auto strict = run_property("psi_monotone", 10, 3, 1, 0.0);
    CHECK(strict.worst_margin == base.worst_margin);
    CHECK(strict.tolerance == tolerance_label(0.0));

    const auto inv = run_property("psi_invariance", 10, 3);
    const auto neg = run_property("psi_invariance", 10, 3, 1, -1.0);
    CHECK(inv.passed());
    CHECK(neg.failures == 10);
    CHECK(neg.worst_margin == inv.worst_margin);
    CHECK(tolerance_label(1e-9) == "abs:1e-09");
  }

  TEST_CASE("rejected draws are counted and listed") {
    bool seen = false;
    for (std::size_t t = 0; t < 40 && !seen; ++t) {
      const auto o = replay_trial("psi_sandwich", 7, t);
      if (o.rejections == 0) continue;
      seen = true;
      CHECK(o.rejection_reasons.size() == o.rejections);
      std::ostringstream os;
      print_outcome(os, "psi_sandwich", o);
      CHECK(os.str().find("  rejected: ") != std::string::npos);
    }
    CHECK(seen);
  }

  TEST_CASE("csv layout") {
    CHECK(csv_header() == "property,trials,failures,worst_margin,seed,rejections,tolerance,generator");
    const auto r = run_property("pipeline_f0", 5, 11);
    const std::string row = csv_row(r);
    CHECK(row.rfind("pipeline_f0,5,0,", 0) == 0);
    CHECK(row.find(kGeneratorVersion) != std::string::npos);
  }
}
