// Runs every acceptance criterion at full size and prints one line per criterion.
#include "bcolab/body.hpp"
#include "bcolab/cli.hpp"
#include "bcolab/ids_bandit.hpp"
#include "bcolab/lemma_lab.hpp"
#include "bcolab/msa.hpp"
#include "bcolab/serialize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace bcolab;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string describe(const lab::VerificationReport& r) {
  return r.property + " trials=" + std::to_string(r.trials) + " failures=" + std::to_string(r.failures) +
         " worst_margin=" + num(r.worst_margin) + " rejections=" + std::to_string(r.rejections);
}

Verdict properties(std::uint64_t seed, std::initializer_list<const char*> ids, double time_limit = 0.0) {
  Verdict v{true, ""};
  const auto t0 = Clock::now();
  for (const char* id : ids) {
    const auto r = lab::run_property(id, lab::property(id).default_trials, seed);
    v.pass = v.pass && r.passed();
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += describe(r);
    for (const auto& [name, range] : r.detail_ranges)
      if (name == "slack_ratio" || name == "ratio")
        v.detail += " " + name + "=[" + num(range.first) + "," + num(range.second) + "]";
  }
  const double secs = seconds_since(t0);
  if (time_limit > 0.0) {
    v.pass = v.pass && secs < time_limit;
    v.detail += " runtime=" + num(secs) + "s (limit " + num(time_limit) + "s)";
  }
  return v;
}

Verdict positioning(std::uint64_t seed) {
  Verdict v = properties(seed, {"msa_position"});
  for (Eigen::Index d : {2, 3}) {
    const auto cube = ConvexBody::box(Vector::Zero(d), Vector::Ones(d));
    const auto r = msa_transform(cube);
    const double err = (r.transform - Matrix::Identity(d, d)).norm();
    v.pass = v.pass && err <= 1e-6;
    v.detail += " cube" + std::to_string(d) + "_T_err=" + num(err);
  }
  return v;
}

long double bound_reference(long double n, long double d, long double alpha, long double beta, long double diam) {
  const long double s = std::max(1.0L, std::sqrt(2 * beta));
  return 3 + n * alpha + std::sqrt(beta * d * n * std::log(3 * n * n * s * diam));
}

Verdict simulator(std::uint64_t seed) {
  const auto t0 = Clock::now();
  ids::SweepConfig cfg;
  cfg.d = 1;
  cfg.n = 200;
  cfg.atoms = 8;
  cfg.seeds = 100;
  cfg.seed = seed;
  const auto s = ids::run_sweep(cfg);
  const double secs = seconds_since(t0);

  const bool a = s.mean_regret <= s.bound_value;
  const bool b = s.mean_sum_2v <= s.log_cover + 3 * s.sum_2v_se;
  double worst = 0.0;
  const double spots[][5] = {{200, 1, 0.005, 0.2, 2}, {1000, 2, 0.001, 3.5, 4}, {50, 3, 0.02, 0.0, 1},
                             {1e4, 1, 1e-4, 0.5, 10}};
  for (const auto& p : spots) {
    const double got = ids::regret_bound(p[0], p[1], p[2], p[3], p[4]);
    const double want = static_cast<double>(bound_reference(p[0], p[1], p[2], p[3], p[4]));
    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
  }
  const bool c = worst <= 1e-12;
  const bool t = secs < 60.0;
  return {a && b && c && t,
          "mean_regret=" + num(s.mean_regret) + " (se " + num(s.regret_se) + ") bound=" + num(s.bound_value) +
              " beta_hat=" + num(s.beta_hat) + " |C|=" + std::to_string(s.cover_size) + " mean_sum_2v=" +
              num(s.mean_sum_2v) + " log|C|=" + num(s.log_cover) + " bound_formula_err=" + num(worst) +
              " runtime=" + num(secs) + "s"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "bcolab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

bool same_manifest(const fs::path& a, const fs::path& b) {
  auto ja = Json::parse(slurp(a)), jb = Json::parse(slurp(b));
  ja.erase("timestamp");
  jb.erase("timestamp");
  ja["config"].erase("out");
  jb["config"].erase("out");
  return ja == jb;
}

Verdict determinism(std::uint64_t seed) {
  const fs::path root = fs::temp_directory_path() / "bcolab-acceptance";
  fs::remove_all(root);
  const std::string s = std::to_string(seed);
  std::size_t compared = 0;
  bool ok = true;
  for (const char* run : {"a", "b"}) {
    const fs::path dir = root / run;
    ok = ok && cli_run({"verify", "--property", "psi_invariance", "--property", "los", "--seed", s, "--out",
                        (dir / "verify").string()}) == 0;
    ok = ok && cli_run({"simulate", "--n", "200", "--seeds", "10", "--seed", s, "--out",
                        (dir / "simulate").string()}) == 0;
    ok = ok && cli_run({"msa", "--d", "3", "--trials", "10", "--seed", s, "--out", (dir / "msa").string()}) == 0;
  }
  const fs::path a = root / "a", b = root / "b";
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    const bool equal = rel.filename() == "manifest.json" ? same_manifest(entry.path(), b / rel)
                                                         : slurp(entry.path()) == slurp(b / rel);
    ok = ok && equal;
    ++compared;
  }
  fs::remove_all(root);
  return {ok && compared > 10, "compared " + std::to_string(compared) + " artifacts byte for byte"};
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 7;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"psi pointwise invariance", [&] { return properties(seed, {"psi_invariance"}, 30.0); }},
      {"psi midpoint concavity", [&] { return properties(seed, {"psi_concavity"}); }},
      {"psi monotone under dilation", [&] { return properties(seed, {"psi_monotone"}); }},
      {"sandwich ratio", [&] { return properties(seed, {"psi_sandwich"}); }},
      {"level-set shadow inequality", [&] { return properties(seed, {"los"}); }},
      {"in-window key inequality", [&] { return properties(seed, {"key"}); }},
      {"concave mass and moments", [&] { return properties(seed, {"concave_mass", "concave_moments"}); }},
      {"surface area positioning", [&] { return positioning(seed); }},
      {"exploratory pipeline", [&] { return properties(seed, {"pipeline_feps", "pipeline_f0"}); }},
      {"combining classes", [&] { return properties(seed, {"combine"}); }},
      {"lifted loss reduction", [&] { return properties(seed, {"lift"}); }},
      {"ids simulator regret", [&] { return simulator(seed); }},
      {"deterministic artifacts", [&] { return determinism(seed); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
              << v.detail << " [" << num(seconds_since(t0)) << "s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
