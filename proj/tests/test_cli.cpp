#include "bcolab/body.hpp"
#include "bcolab/cli.hpp"
#include "bcolab/serialize.hpp"
#include "doctest.h"
#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace bcolab;
using testing::vec;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bcolab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = bcolab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bcolab-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    const auto none = run_cli({});
    CHECK(none.code == 2);
    CHECK(none.err.find("verify") != std::string::npos);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"verify"}).code == 2);
    CHECK(run_cli({"verify", "--property", "nope"}).code == 2);
    CHECK(run_cli({"simulate", "--d", "2"}).code == 2);
    CHECK(run_cli({"psi", "--d", "0"}).code == 2);
  }

  TEST_CASE("config files") {
    const fs::path dir = scratch("config");
    spit(dir / "bad.json", R"({"command": "psi", "bogus": 1})");
    CHECK(run_cli({"--config", (dir / "bad.json").string()}).code == 2);

    spit(dir / "good.json", R"({"command": "psi", "d": 3, "trials": 2, "samples": 64, "out": ")" +
                                (dir / "a").string() + R"("})");
    REQUIRE(run_cli({"--config", (dir / "good.json").string(), "--d", "2"}).code == 0);
    const std::string csv = slurp(dir / "a" / "psi.csv");
    CHECK(csv.find("\n0,2,") != std::string::npos);
    const auto manifest = Json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(manifest["config"]["d"] == 2);
    CHECK(manifest["constants"]["key_constant"] == 8192);
  }

  TEST_CASE("verify then replay") {
    const fs::path dir = scratch("verify");
    const auto v = run_cli({"verify", "--property", "psi_concavity", "--trials", "12", "--seed", "4", "--out",
                        dir.string()});
    REQUIRE(v.code == 0);
    CHECK(v.out.find("PASS psi_concavity") != std::string::npos);
    const std::string csv = slurp(dir / "verify.csv");
    CHECK(csv.rfind("property,trials,failures,worst_margin,seed", 0) == 0);

    const auto r = run_cli({"replay", (dir / "verify.csv").string(), "--property", "psi_concavity", "--trial", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("seed 4") != std::string::npos);

    const auto again = run_cli({"replay", (dir / "verify.csv").string(), "--property", "psi_concavity", "--trial", "3"});
    CHECK(again.out == r.out);

    std::string stale = csv;
    stale.replace(stale.rfind("lab-"), 5, "lab-0");
    spit(dir / "stale.csv", stale);
    CHECK(run_cli({"replay", (dir / "stale.csv").string(), "--property", "psi_concavity", "--trial", "0"}).code == 2);
  }

  TEST_CASE("failing verification exits 1 and writes the worst trial") {
    const fs::path dir = scratch("fail");
    const auto v = run_cli({"verify", "--property", "psi_invariance", "--trials", "20", "--tol", "0", "--out",
                        dir.string()});
    CHECK(v.code == 1);
    CHECK(v.out.find("FAIL psi_invariance") != std::string::npos);
    CHECK(fs::exists(dir / "psi_invariance_worst_trial.txt"));
  }

  TEST_CASE("simulate writes traces and a summary") {
    const fs::path dir = scratch("simulate");
    const auto s = run_cli({"simulate", "--n", "20", "--seeds", "3", "--atoms", "3", "--seed", "1", "--out", dir.string()});
    REQUIRE(s.code == 0);
    const auto summary = Json::parse(slurp(dir / "summary.json"));
    CHECK(summary["seeds"] == 3);
    CHECK(summary["mean_regret"].get<double>() <= summary["bound_value"].get<double>());
    CHECK(fs::exists(dir / "traces" / "episode_0002.csv"));
    CHECK(slurp(dir / "traces" / "episode_0000.csv").rfind("round,action_index,loss", 0) == 0);
  }

  TEST_CASE("body files for psi and msa") {
    const fs::path dir = scratch("body");
    spit(dir / "disc.json", to_json(ConvexBody::ball(vec({0, 0}), 1.0)).dump());
    REQUIRE(run_cli({"psi", "--body", (dir / "disc.json").string(), "--x", "3,0", "--samples", "256", "--out",
                 dir.string()})
                .code == 0);
    const std::string psi = slurp(dir / "psi.csv");
    CHECK(psi.find("\n0,2,0.5") != std::string::npos);
    CHECK(run_cli({"psi", "--body", (dir / "disc.json").string(), "--x", "3,0,0", "--out", dir.string()}).code == 2);

    spit(dir / "box.json", to_json(ConvexBody::box(vec({0, 0}), vec({2, 1}))).dump());
    REQUIRE(run_cli({"msa", "--body", (dir / "box.json").string(), "--out", dir.string()}).code == 0);
    const auto msa = Json::parse(slurp(dir / "msa.json"));
    CHECK(msa[0]["position"]["converged"] == true);
  }

  TEST_CASE("explore writes class summaries") {
    const fs::path dir = scratch("explore");
    REQUIRE(run_cli({"explore", "--d", "1", "--trials", "2", "--atoms", "2", "--out", dir.string()}).code == 0);
    CHECK(slurp(dir / "explore.csv").rfind("trial,d,atoms,classes", 0) == 0);
  }
}
