#include "bcolab/cli.hpp"

#include "bcolab/error.hpp"
#include "bcolab/explore.hpp"
#include "bcolab/geometry.hpp"
#include "bcolab/ids_bandit.hpp"
#include "bcolab/instances.hpp"
#include "bcolab/lemma_lab.hpp"
#include "bcolab/minimize.hpp"
#include "bcolab/msa.hpp"
#include "bcolab/random.hpp"
#include "bcolab/serialize.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace bcolab::cli {

namespace {

namespace fs = std::filesystem;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands = {"verify", "replay", "psi", "msa", "explore", "simulate"};

struct Config {
  std::optional<std::string> command;
  std::vector<std::string> args;
  std::optional<int> d, n, atoms;
  std::optional<double> m, tol;
  std::optional<std::size_t> trials, seeds, trial, samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode, out, body, x;
  std::optional<unsigned> jobs;
  std::vector<std::string> properties;
  bool all = false;
  bool sequence_prior = false;
};

// Resolved settings after flags, config file and per-command defaults.
struct Settings {
  std::string command;
  std::vector<std::string> args;
  int d = 2, n = 10, atoms = 8;
  double m = 1.0;
  std::optional<double> tol;
  std::size_t trials = 0, seeds = 100, samples = 4096;
  std::optional<std::size_t> trial;
  std::uint64_t seed = 0;
  std::string mode = "ids-opt", out = "bcolab-out";
  std::optional<std::string> body, x;
  unsigned jobs = 1;
  std::vector<std::string> properties;
  bool all = false, sequence_prior = false;
};

template <class T>
void fill(std::optional<T>& slot, const Json& j, const char* key) {
  if (slot) return;
  try {
    slot = j.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void merge_config_file(Config& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  const std::map<std::string, std::function<void(const Json&)>> keys = {
      {"command", [&](const Json& v) { fill(c.command, v, "command"); }},
      {"d", [&](const Json& v) { fill(c.d, v, "d"); }},
      {"n", [&](const Json& v) { fill(c.n, v, "n"); }},
      {"m", [&](const Json& v) { fill(c.m, v, "m"); }},
      {"trials", [&](const Json& v) { fill(c.trials, v, "trials"); }},
      {"seeds", [&](const Json& v) { fill(c.seeds, v, "seeds"); }},
      {"seed", [&](const Json& v) { fill(c.seed, v, "seed"); }},
      {"mode", [&](const Json& v) { fill(c.mode, v, "mode"); }},
      {"tol", [&](const Json& v) { fill(c.tol, v, "tol"); }},
      {"jobs", [&](const Json& v) { fill(c.jobs, v, "jobs"); }},
      {"out", [&](const Json& v) { fill(c.out, v, "out"); }},
      {"atoms", [&](const Json& v) { fill(c.atoms, v, "atoms"); }},
      {"trial", [&](const Json& v) { fill(c.trial, v, "trial"); }},
      {"samples", [&](const Json& v) { fill(c.samples, v, "samples"); }},
      {"body", [&](const Json& v) { fill(c.body, v, "body"); }},
      {"x", [&](const Json& v) { fill(c.x, v, "x"); }},
      {"all", [&](const Json& v) { c.all = c.all || v.get<bool>(); }},
      {"sequence_prior", [&](const Json& v) { c.sequence_prior = c.sequence_prior || v.get<bool>(); }},
      {"property",
       [&](const Json& v) {
         if (!c.properties.empty()) return;
         if (v.is_string()) c.properties = {v.get<std::string>()};
         else c.properties = v.get<std::vector<std::string>>();
       }},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(value);
  }
}

Settings resolve(const Config& c) {
  Settings s;
  if (!c.command) throw ConfigError("no command given");
  s.command = *c.command;
  if (std::find(kCommands.begin(), kCommands.end(), s.command) == kCommands.end())
    throw ConfigError("unknown command '" + s.command + "'");
  s.args = c.args;
  const bool sim = s.command == "simulate";
  s.d = c.d.value_or(sim ? 1 : 2);
  s.n = c.n.value_or(sim ? 200 : 10);
  s.m = c.m.value_or(1.0);
  s.atoms = c.atoms.value_or(sim ? 8 : 3);
  s.tol = c.tol;
  s.trials = c.trials.value_or(0);
  s.seeds = c.seeds.value_or(100);
  s.samples = c.samples.value_or(4096);
  s.trial = c.trial;
  s.seed = c.seed.value_or(0);
  s.mode = c.mode.value_or("ids-opt");
  s.out = c.out.value_or("bcolab-out");
  s.body = c.body;
  s.x = c.x;
  s.jobs = c.jobs.value_or(1);
  s.properties = c.properties;
  s.all = c.all;
  s.sequence_prior = c.sequence_prior;

  auto positive = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(s.d >= 1, "d");
  positive(s.n >= 1, "n");
  positive(s.m > 0.0, "m");
  positive(s.atoms >= 1, "atoms");
  positive(!c.trials || s.trials >= 1, "trials");
  positive(s.seeds >= 1, "seeds");
  positive(s.samples >= 1, "samples");
  positive(s.jobs >= 1, "jobs");
  positive(!s.tol || *s.tol >= 0.0, "tol");
  if (s.d > 3) throw ConfigError("d must be at most 3");
  try {
    ids::parse_mode(s.mode);
  } catch (const Error&) {
    throw ConfigError("mode must be 'ids-opt' or 'constructed'");
  }
  if (s.command == "verify") {
    if (!s.all && s.properties.empty()) throw ConfigError("verify needs --all or --property");
    for (const auto& p : s.properties) {
      try {
        lab::property(p);
      } catch (const Error&) {
        throw ConfigError("unknown property '" + p + "'");
      }
    }
  }
  if (s.command == "replay") {
    if (s.args.size() != 1) throw ConfigError("replay needs exactly one artifact path");
    if (s.properties.size() != 1) throw ConfigError("replay needs one --property");
    if (!s.trial) throw ConfigError("replay needs --trial");
  }
  if (s.command == "simulate" && s.d != 1) throw ConfigError("simulate supports d = 1 only");
  if (s.x && !s.body) throw ConfigError("--x requires --body");
  return s;
}

// ---- Artifacts ----------------------------------------------------------------

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  os << text;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json config_echo(const Settings& s) {
  Json j = {{"command", s.command}, {"d", s.d},         {"n", s.n},
            {"m", s.m},             {"atoms", s.atoms}, {"trials", s.trials},
            {"seeds", s.seeds},     {"seed", s.seed},   {"mode", s.mode},
            {"jobs", s.jobs},       {"out", s.out},     {"samples", s.samples}};
  j["tol"] = s.tol ? Json(*s.tol) : Json(nullptr);
  if (!s.properties.empty()) j["property"] = s.properties;
  if (s.all) j["all"] = true;
  if (s.sequence_prior) j["sequence_prior"] = true;
  if (s.body) j["body"] = *s.body;
  if (s.x) j["x"] = *s.x;
  return j;
}

Json constants(const Settings& s) {
  const auto d = static_cast<Eigen::Index>(s.d);
  const EpsilonGrid grid = epsilon_grid(s.d, s.n, s.m);
  return {{"psi_window_low", {{"formula", "1/(128d)"}, {"value", psi_window_low(d)}}},
          {"psi_window_high", {{"formula", "1/(32d)"}, {"value", psi_window_high(d)}}},
          {"psi_target", {{"formula", "1/(64d)"}, {"value", psi_target(d)}}},
          {"gamma", {{"formula", "1+1/(9d)"}, {"value", grid.gamma}}},
          {"eps0",
           {{"formula", "m/(2^17 d^2 n^4)"}, {"d", s.d}, {"n", s.n}, {"m", s.m}, {"value", grid.eps0}}},
          {"key_constant", 8192},
          {"sigma_slack", lab::kSigmaSlack},
          {"exact_tolerance", lab::kExactTol}};
}

void write_manifest(const Settings& s, const fs::path& dir) {
  write_json(dir / "manifest.json", {{"config", config_echo(s)},
                                     {"seed", s.seed},
                                     {"generator", lab::kGeneratorVersion},
                                     {"constants", constants(s)},
                                     {"timestamp", utc_timestamp()}});
}

fs::path prepare_out(const Settings& s) {
  fs::path dir(s.out);
  fs::create_directories(dir);
  return dir;
}

Vector parse_point(const std::string& text) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      xs.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--x must be a comma-separated list of numbers");
    }
  }
  if (xs.empty()) throw ConfigError("--x is empty");
  return Eigen::Map<Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

ConvexBody load_body(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read body file " + path);
  try {
    return body_from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    throw ConfigError("body file is not valid: " + std::string(e.what()));
  }
}

// ---- Commands -------------------------------------------------------------------

int cmd_verify(const Settings& s, std::ostream& out) {
  const fs::path dir = prepare_out(s);
  std::vector<std::string> ids = s.properties;
  if (s.all) {
    ids.clear();
    for (const auto& p : lab::properties()) ids.push_back(p.id);
  }
  std::string csv = lab::csv_header() + "\n";
  std::vector<std::string> failing;
  for (const auto& id : ids) {
    const std::size_t trials = s.trials ? s.trials : lab::property(id).default_trials;
    const auto report = lab::run_property(id, trials, s.seed, s.jobs, s.tol);
    csv += lab::csv_row(report) + "\n";
    out << (report.passed() ? "PASS " : "FAIL ") << id << " trials=" << report.trials
        << " failures=" << report.failures << " worst_margin=" << fmt(report.worst_margin)
        << " rejections=" << report.rejections << "\n";
    if (!report.passed()) {
      const fs::path path = dir / (id + "_worst_trial.txt");
      std::ostringstream detail;
      lab::print_outcome(detail, id, lab::replay_trial(id, s.seed, report.worst_trial, s.tol));
      write_text(path, detail.str());
      failing.push_back(path.string());
    }
  }
  write_text(dir / "verify.csv", csv);
  write_manifest(s, dir);
  out << "report: " << (dir / "verify.csv").string() << "\n";
  for (const auto& path : failing) out << "failing report: " << path << "\n";
  return failing.empty() ? 0 : 1;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

int cmd_replay(const Settings& s, std::ostream& out) {
  std::ifstream in(s.args.front());
  if (!in) throw ConfigError("cannot read artifact " + s.args.front());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("artifact is empty");
  const auto header = split_csv(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("artifact has no '" + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_prop = column("property"), c_seed = column("seed"), c_gen = column("generator");
  const std::string& id = s.properties.front();
  while (std::getline(in, line)) {
    const auto row = split_csv(line);
    if (row.size() != header.size() || row[c_prop] != id) continue;
    require(row[c_gen] == lab::kGeneratorVersion, Errc::VersionMismatch,
            "artifact generator " + row[c_gen] + " differs from " + lab::kGeneratorVersion);
    const std::uint64_t seed = std::stoull(row[c_seed]);
    const auto outcome = lab::replay_trial(id, seed, *s.trial, s.tol);
    out << "seed " << seed << "\n";
    lab::print_outcome(out, id, outcome);
    return outcome.failed() ? 1 : 0;
  }
  throw ConfigError("artifact has no row for property '" + id + "'");
}

std::size_t study_trials(const Settings& s, std::size_t fallback) { return s.trials ? s.trials : fallback; }

int cmd_psi(const Settings& s, std::ostream& out) {
  const fs::path dir = prepare_out(s);
  auto row = [&](std::size_t trial, const ConvexBody& k, const Vector& x) {
    const PsiReport r = psi_avg(k, x, s.samples, substream_seed(s.seed, hash_tag("psi"), trial));
    return std::to_string(trial) + "," + std::to_string(k.dim()) + "," + fmt(r.point_value) + "," +
           fmt(r.avg_value) + "," + fmt(r.mc_stderr) + "," + fmt(r.max_value) + "\n";
  };
  std::string csv = "trial,d,psi_point,psi_avg,psi_stderr,psi_max\n";
  if (s.body) {
    const ConvexBody k = load_body(*s.body);
    if (!s.x) throw ConfigError("--body requires --x for psi");
    const Vector x = parse_point(*s.x);
    if (x.size() != k.dim()) throw ConfigError("--x has the wrong dimension");
    csv += row(0, k, x);
  } else {
    const std::size_t trials = study_trials(s, 100);
    for (std::size_t t = 0; t < trials; ++t) {
      Rng rng(s.seed, "psi-instance", t);
      const ConvexBody k = instances::random_polytope(s.d, rng);
      csv += row(t, k, instances::random_outside_point(k, rng));
    }
  }
  write_text(dir / "psi.csv", csv);
  write_manifest(s, dir);
  out << "wrote " << (dir / "psi.csv").string() << "\n";
  return 0;
}

double max_shadow_ratio(const ConvexBody& k, std::uint64_t seed) {
  return shadow_surface_ratio(surface_measure(k), k.dim(), 1000, seed).max_ratio;
}

int cmd_msa(const Settings& s, std::ostream& out) {
  const fs::path dir = prepare_out(s);
  std::string csv = "trial,d,residual,iterations,converged,ratio_before,ratio_after\n";
  Json positions = Json::array();
  std::size_t failures = 0;
  auto study = [&](std::size_t trial, const ConvexBody& k) {
    const PositionResult r = msa_transform(k);
    const std::uint64_t dir_seed = substream_seed(s.seed, hash_tag("msa-directions"), trial);
    const double before = max_shadow_ratio(k, dir_seed);
    const double after = max_shadow_ratio(k.transformed(r.transform), dir_seed);
    if (!r.converged) ++failures;
    csv += std::to_string(trial) + "," + std::to_string(k.dim()) + "," + fmt(r.residual) + "," +
           std::to_string(r.iterations) + "," + (r.converged ? "1" : "0") + "," + fmt(before) + "," +
           fmt(after) + "\n";
    positions.push_back({{"trial", trial}, {"position", to_json(r)}});
  };
  if (s.body) {
    study(0, load_body(*s.body));
  } else {
    const std::size_t trials = study_trials(s, 100);
    for (std::size_t t = 0; t < trials; ++t) {
      Rng rng(s.seed, "msa-instance", t);
      study(t, instances::random_polytope(s.d, rng));
    }
  }
  write_text(dir / "msa.csv", csv);
  write_json(dir / "msa.json", positions);
  write_manifest(s, dir);
  out << "wrote " << (dir / "msa.csv").string() << " (" << failures << " not converged)\n";
  return failures == 0 ? 0 : 1;
}

int cmd_explore(const Settings& s, std::ostream& out) {
  const fs::path dir = prepare_out(s);
  const auto d = static_cast<Eigen::Index>(s.d);
  const ConvexBody ambient = ConvexBody::box(Vector::Constant(d, -1.0), Vector::Constant(d, 1.0));
  const double alpha = 1.0 / s.n;
  std::string csv = "trial,d,atoms,classes,unclassified,inf_lhs,inf_variance,beta_fit\n";
  Json reports = Json::array();
  const std::size_t trials = study_trials(s, 10);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(s.seed, "explore-instance", t);
    FunctionMeasure mu;
    std::vector<std::pair<double, ConvexFunction>> parts;
    for (int a = 0; a < s.atoms; ++a) {
      const Vector c = rng.uniform_box(Vector::Constant(d, -0.8), Vector::Constant(d, 0.8));
      // Hessian eigenvalues in [m, 4m].
      const ConvexFunction f = instances::random_quadratic(d, rng, c, 2.0 * s.m, rng.uniform(0.0, 0.2), 4.0);
      mu.atoms.push_back(with_computed_minimum(f, ambient));
      mu.weights.push_back(1.0 / s.atoms);
      parts.emplace_back(1.0 / s.atoms, f);
    }
    const ConvexFunction fbar = with_computed_minimum(ConvexFunction::sum(parts), ambient);
    const EpsilonGrid grid = epsilon_grid(s.d, s.n, fbar.strong_convexity());
    ExploreOptions opts;
    opts.classify.samples = s.samples;
    opts.classify.seed = substream_seed(s.seed, hash_tag("explore-classify"), t);
    const Exploration e = explore(fbar, mu, grid, ambient, opts);
    const InfTerms terms = inf_terms(fbar, mu, e.rho);
    double beta = std::numeric_limits<double>::infinity();
    try {
      beta = fit_beta(terms, alpha);
    } catch (const Error&) {
    }
    csv += std::to_string(t) + "," + std::to_string(s.d) + "," + std::to_string(s.atoms) + "," +
           std::to_string(e.class_masses.size()) + "," + std::to_string(e.unclassified) + "," +
           fmt(terms.lhs) + "," + fmt(terms.variance) + "," + fmt(beta) + "\n";
    Json labels = Json::array();
    for (const auto& l : e.labels) labels.push_back(to_json(l));
    reports.push_back({{"trial", t},
                       {"labels", labels},
                       {"class_masses", e.class_masses},
                       {"unclassified", e.unclassified},
                       {"rho", to_json(e.rho)}});
  }
  write_text(dir / "explore.csv", csv);
  write_json(dir / "explore.json", reports);
  write_manifest(s, dir);
  out << "wrote " << (dir / "explore.csv").string() << "\n";
  return 0;
}

int cmd_simulate(const Settings& s, std::ostream& out) {
  const fs::path dir = prepare_out(s);
  ids::SweepConfig cfg;
  cfg.d = s.d;
  cfg.n = s.n;
  cfg.atoms = s.atoms;
  cfg.seeds = s.seeds;
  cfg.seed = s.seed;
  cfg.mode = ids::parse_mode(s.mode);
  cfg.sequence_prior = s.sequence_prior;
  cfg.jobs = s.jobs;
  cfg.explore.classify.samples = s.samples;
  const ids::SweepSummary summary = ids::run_sweep(cfg);
  fs::create_directories(dir / "traces");
  for (std::size_t i = 0; i < summary.traces.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "episode_%04zu.csv", i);
    std::ofstream os(dir / "traces" / name, std::ios::binary);
    ids::write_trace_csv(os, summary.traces[i]);
  }
  write_json(dir / "summary.json", to_json(summary));
  write_manifest(s, dir);
  out << "mean_regret=" << fmt(summary.mean_regret) << " bound_value=" << fmt(summary.bound_value)
      << " beta_hat=" << fmt(summary.beta_hat) << " cover_size=" << summary.cover_size << "\n";
  out << "wrote " << (dir / "summary.json").string() << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bandit convex optimization lab: property suites, geometry studies, IDS sweeps", "bcolab"};
  app.footer("Commands: verify, replay <artifact.csv>, psi, msa, explore, simulate");
  Config c;
  std::string config_path;
  std::string command;
  app.add_option("command", command, "verify | replay | psi | msa | explore | simulate");
  app.add_option("args", c.args, "positional arguments (replay: artifact path)");
  app.add_option("--config", config_path, "JSON file with the same keys as the flags; flags win");
  app.add_option("--d", c.d, "dimension");
  app.add_option("--n", c.n, "horizon");
  app.add_option("--m", c.m, "strong convexity modulus");
  app.add_option("--trials", c.trials, "trials (verify default: per property)");
  app.add_option("--seeds", c.seeds, "episodes for simulate");
  app.add_option("--seed", c.seed, "base seed")->envname("BCOLAB_SEED");
  app.add_option("--mode", c.mode, "ids-opt | constructed");
  app.add_option("--tol", c.tol, "absolute tolerance replacing every check tolerance");
  app.add_option("--jobs", c.jobs, "worker threads");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--atoms", c.atoms, "prior atoms (simulate) or mixture atoms (explore)");
  app.add_option("--property", c.properties, "property id (repeatable)");
  app.add_option("--trial", c.trial, "trial index for replay");
  app.add_option("--samples", c.samples, "Monte Carlo samples per ratio evaluation");
  app.add_option("--body", c.body, "JSON body file for psi / msa");
  app.add_option("--x", c.x, "comma-separated viewpoint for psi");
  app.add_flag("--all", c.all, "verify every property");
  app.add_flag("--sequence-prior", c.sequence_prior, "drifting loss sequences in simulate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!command.empty()) c.command = command;
    if (!config_path.empty()) merge_config_file(c, config_path);
    if (!c.command) {
      err << app.help();
      return 2;
    }
    const Settings s = resolve(c);
    if (s.command == "verify") return cmd_verify(s, out);
    if (s.command == "replay") return cmd_replay(s, out);
    if (s.command == "psi") return cmd_psi(s, out);
    if (s.command == "msa") return cmd_msa(s, out);
    if (s.command == "explore") return cmd_explore(s, out);
    return cmd_simulate(s, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::VersionMismatch ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bcolab::cli
