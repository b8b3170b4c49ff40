#include "bcolab/lemma_lab.hpp"

#include "bcolab/error.hpp"
#include "bcolab/explore.hpp"
#include "bcolab/geometry.hpp"
#include "bcolab/hull.hpp"
#include "bcolab/ids_bandit.hpp"
#include "bcolab/instances.hpp"
#include "bcolab/minimize.hpp"
#include "bcolab/msa.hpp"
#include "bcolab/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace bcolab::lab {

bool TrialOutcome::failed() const {
  return checks.empty() || std::any_of(checks.begin(), checks.end(), [](const Check& c) {
           return c.failed();
         });
}

double TrialOutcome::worst_margin() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) w = std::min(w, c.margin);
  return checks.empty() ? -std::numeric_limits<double>::infinity() : w;
}

namespace {

using namespace bcolab::instances;

constexpr int kMaxAttempts = 64;
constexpr double kKeyConstant = 8192.0;  // 2^13

struct Reject {
  std::string why;
};

struct Sample {
  double mean = 0.0;
  double se = 0.0;
};

Sample summarize(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {m, std::sqrt(var / n)};
}

template <class Body>
TrialOutcome attempt_loop(const char* id, std::uint64_t seed, std::size_t trial, Body&& body) {
  TrialOutcome out;
  out.trial = trial;
  const std::uint64_t trial_seed = substream_seed(seed, hash_tag(id), trial);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(trial_seed, "attempt", static_cast<std::uint64_t>(attempt));
    try {
      body(rng, out);
      return out;
    } catch (const Reject& r) {
      out.rejection_reasons.push_back(r.why);
    } catch (const Error& e) {
      switch (e.code()) {
        case Errc::WindowMiss:
        case Errc::BisectionFailure:
        case Errc::RejectionFailure:
        case Errc::XInsideBody:
        case Errc::DegenerateFacet:
        case Errc::EpsTooSmall:
        case Errc::NoConvergence:
        case Errc::ZeroVariance:
          out.rejection_reasons.push_back(std::string(errc_name(e.code())) + ": " + e.what());
          break;
        default:
          throw;
      }
    }
    out.checks.clear();
    out.details.clear();
    ++out.rejections;
  }
  out.rejection_reasons.push_back("no accepted instance within the attempt cap");
  return out;
}

void detail(TrialOutcome& t, const std::string& name, double v) { t.details.emplace_back(name, v); }

ConvexBody unit_box(Eigen::Index d) {
  return ConvexBody::box(Vector::Constant(d, -1.0), Vector::Constant(d, 1.0));
}

// ---- Psi suites -----------------------------------------------------------

TrialOutcome psi_invariance(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("psi_invariance", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(trial % 2);
    const ConvexBody k = random_polytope(d, rng);
    const Vector x = random_outside_point(k, rng);
    const Vector z = ShadowSampler(k, x).sample(rng);
    const Matrix t = random_linear(d, rng, 0.3, 3.0);
    const ConvexBody tk = k.transformed(t);
    const Vector tx = t * x;
    const Vector lz = project(tx, t * z);
    const double a = psi_point(k, x, z);
    const double b = psi_point(tk, tx, lz);
    detail(out, "d", static_cast<double>(d));
    detail(out, "psi", a);
    detail(out, "psi_mapped", b);
    out.checks.push_back({"invariance", -std::abs(a - b), kExactTol});
  });
}

TrialOutcome psi_concavity(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("psi_concavity", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(trial % 2);
    const ConvexBody k = random_polytope(d, rng);
    const Vector x = random_outside_point(k, rng);
    const ShadowSampler sampler(k, x);
    const Vector z = sampler.sample(rng);
    const Vector w = sampler.sample(rng);
    const double pz = psi_point(k, x, z);
    const double pw = psi_point(k, x, w);
    const double pm = psi_point(k, x, 0.5 * (z + w));
    detail(out, "psi_z", pz);
    detail(out, "psi_w", pw);
    detail(out, "psi_mid", pm);
    out.checks.push_back({"midpoint_concavity", pm - 0.5 * (pz + pw), kExactTol});
  });
}

TrialOutcome psi_monotone(std::uint64_t seed, std::size_t trial) {
  static constexpr double kGammas[] = {1.1, 1.5, 2.0};
  return attempt_loop("psi_monotone", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const double gamma = kGammas[trial % 3];
    const Eigen::Index d = 2 + static_cast<Eigen::Index>((trial / 3) % 2);
    const ConvexBody a = random_polytope(d, rng);
    const ConvexBody ga = a.scaled(gamma);
    const Vector x = random_outside_point(ga, rng);
    const ShadowSampler sampler(a, x);
    // P_x(gamma A) = gamma P_x(A), so w -> gamma w pairs the two uniform shadows.
    std::vector<double> diff;
    for (int i = 0; i < 512; ++i) {
      const Vector w = sampler.sample(rng);
      diff.push_back(psi_point(ga, x, gamma * w) - psi_point(a, x, w));
    }
    const Sample s = summarize(diff);
    detail(out, "gamma", gamma);
    detail(out, "mean_gain", s.mean);
    detail(out, "stderr", s.se);
    out.checks.push_back({"dilation_monotone", s.mean, kSigmaSlack * s.se});
  });
}

TrialOutcome psi_sandwich(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("psi_sandwich", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(trial % 2);
    const double gamma = 1.0 + 1.0 / (9.0 * static_cast<double>(d));
    const ConvexBody a = random_polytope(d, rng);
    std::vector<Vector> shrunk;
    for (const auto& v : a.vertices()) shrunk.push_back(rng.uniform(1.0 / gamma, 1.0) * v);
    const ConvexBody b = ConvexBody::from_vertices(shrunk);
    const Vector x = random_outside_point(a, rng, 0.2, 6.0);
    const std::uint64_t s = rng.next_u64();
    const PsiReport pa = psi_avg(a, x, 4096, s);
    if (pa.avg_value > 1.0 / (2.0 * static_cast<double>(d))) throw Reject{"Psi_A(x) above 1/(2d)"};
    const PsiReport pb = psi_avg(b, x, 4096, s);
    const double ratio = pb.avg_value / pa.avg_value;
    const double sigma = ratio * std::hypot(pa.mc_stderr / pa.avg_value, pb.mc_stderr / pb.avg_value);
    detail(out, "psi_a", pa.avg_value);
    detail(out, "psi_b", pb.avg_value);
    detail(out, "ratio", ratio);
    out.checks.push_back({"ratio_low", ratio - 0.5, kSigmaSlack * sigma});
    out.checks.push_back({"ratio_high", 2.0 - ratio, kSigmaSlack * sigma});
  });
}

// ---- Line-of-sight inequality ----------------------------------------------

ConvexFunction random_loss(Eigen::Index d, Rng& rng) {
  const Vector c = rng.uniform_box(Vector::Constant(d, -1.0), Vector::Constant(d, 1.0));
  if (rng.uniform() < 0.5) {
    return random_quadratic(d, rng, c, rng.uniform(0.2, 2.0), rng.uniform(0.0, 0.5), 8.0);
  }
  return random_max_affine(d, rng, c, static_cast<int>(d) + 2);
}

TrialOutcome los(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("los", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(trial % 3);
    const ConvexBody domain = unit_box(d);
    ConvexFunction f = with_computed_minimum(random_loss(d, rng), domain);
    ConvexFunction g = with_computed_minimum(random_loss(d, rng), domain);
    if (*f.min_value() > *g.min_value()) std::swap(f, g);
    const Vector& xf = *f.minimizer();
    const Vector& xg = *g.minimizer();
    const double gap = g(xf) - *g.min_value();
    if (gap < 1e-6) throw Reject{"x* inside every level set of g"};
    const double eps = gap * rng.uniform(0.05, 0.95);
    const double level = *g.min_value() + eps;
    const ConvexBody k = ConvexBody::level_set(g, level, xg, Vector::Constant(d, -50.0),
                                               Vector::Constant(d, 50.0));
    const Vector u = rng.unit_vector(d);
    const Vector p = xg + rng.uniform(0.0, 0.9) * ray_clip(k, xg, u).t_out * u;
    const Vector v = (p - xf).normalized();
    const Interval iv = ray_clip(k, xf, v);
    const Vector x = xf + iv.t_in * v;
    const Vector y = xf + iv.t_out * v;
    const double tol = 1e-8 * std::max(1.0, std::abs(level));
    if (std::abs(g(x) - level) > tol || std::abs(g(y) - level) > tol) {
      throw Reject{"chord endpoint on the bounding box instead of the level set"};
    }
    const double psi = (iv.t_out - iv.t_in) / iv.t_out;
    const double lhs = std::pow(f(x) - g(x), 2) + std::pow(f(y) - g(y), 2);
    const double rhs = 0.5 * psi * psi * std::pow(level - *f.min_value(), 2);
    detail(out, "d", static_cast<double>(d));
    detail(out, "eps", eps);
    detail(out, "psi", psi);
    detail(out, "lhs", lhs);
    detail(out, "rhs", rhs);
    out.checks.push_back({"los", lhs - rhs, kExactTol});
  });
}

// ---- Level-set instances -----------------------------------------------------

constexpr int kLabHorizon = 10;

struct LevelInstance {
  ConvexBody ambient;
  ConvexFunction fbar;
  ConvexFunction f;
  EpsilonGrid grid;
};

LevelInstance level_instance(Eigen::Index d, Rng& rng, bool force_f0) {
  ConvexBody ambient = unit_box(d);
  const Vector cg = rng.uniform_box(Vector::Constant(d, -0.3), Vector::Constant(d, 0.3));
  ConvexFunction g = random_quadratic(d, rng, cg, rng.uniform(0.5, 1.5), 0.5);
  if (rng.uniform() < 0.5) {
    g = ConvexFunction::sum({{1.0, g}, {0.3, random_max_affine(d, rng, cg, static_cast<int>(d) + 2)}});
  }
  g = with_computed_minimum(g, ambient);
  const Vector cf = rng.uniform_box(Vector::Constant(d, -0.9), Vector::Constant(d, 0.9));
  const double fstar = force_f0 ? *g.min_value() - rng.uniform(0.0, 1.0 / kLabHorizon)
                                : rng.uniform(0.0, 0.3);
  ConvexFunction f =
      with_computed_minimum(random_quadratic(d, rng, cf, rng.uniform(0.3, 1.5), fstar), ambient);
  EpsilonGrid grid = epsilon_grid(static_cast<int>(d), kLabHorizon, g.strong_convexity());
  return {std::move(ambient), std::move(g), std::move(f), std::move(grid)};
}

struct SurfaceIntegrals {
  double lhs = 0.0, lhs_se = 0.0;
  double var = 0.0, var_se = 0.0;
};

// Means of fbar - f* and (fbar - f)^2 over equally weighted points.
SurfaceIntegrals surface_integrals(const std::vector<Vector>& pts, const ConvexFunction& fbar,
                                   const ConvexFunction& f) {
  std::vector<double> a, b;
  for (const auto& p : pts) {
    const double gv = fbar(p);
    a.push_back(gv - *f.min_value());
    b.push_back((gv - f(p)) * (gv - f(p)));
  }
  const Sample sa = summarize(a), sb = summarize(b);
  return {sa.mean, sa.se, sb.mean, sb.se};
}

// rhs = c sqrt(var); combined standard error of rhs - lhs by the delta method.
double key_sigma(const SurfaceIntegrals& s, double c) {
  const double rhs_se = s.var > 0.0 ? c * s.var_se / (2.0 * std::sqrt(s.var)) : 0.0;
  return std::hypot(s.lhs_se, rhs_se);
}

TrialOutcome key(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("key", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(trial % 2);
    const auto inst = level_instance(d, rng, false);
    ClassifyOptions opts;
    opts.seed = rng.next_u64();
    const ClassLabel label = classify(inst.f, inst.fbar, inst.grid, inst.ambient, opts);
    if (label.tag == ClassLabel::Tag::F0) throw Reject{"pair classified F0"};
    const ConvexBody k = level_set(inst.fbar, label.level, default_rays(d), &inst.ambient);
    const SurfaceMeasure sm = surface_measure(k);
    const double ratio = shadow_surface_ratio(sm, d, 1000, rng.next_u64()).max_ratio;
    std::vector<Vector> pts;
    for (int i = 0; i < 4096; ++i) pts.push_back(sample_boundary(sm, rng));
    const auto s = surface_integrals(pts, inst.fbar, inst.f);
    const double c = kKeyConstant * static_cast<double>(d) * std::sqrt(ratio);
    const double rhs = c * std::sqrt(s.var);
    detail(out, "d", static_cast<double>(d));
    detail(out, "level", label.level);
    detail(out, "witness_psi", label.witness);
    detail(out, "shadow_ratio", ratio);
    detail(out, "lhs", s.lhs);
    detail(out, "rhs", rhs);
    detail(out, "slack_ratio", rhs / s.lhs);
    out.checks.push_back({"key", rhs - s.lhs, kSigmaSlack * key_sigma(s, c)});
  });
}

TrialOutcome pipeline_feps(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("pipeline_feps", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(trial % 2);
    const auto inst = level_instance(d, rng, false);
    ClassifyOptions opts;
    opts.seed = rng.next_u64();
    const ClassLabel label = classify(inst.f, inst.fbar, inst.grid, inst.ambient, opts);
    if (label.tag == ClassLabel::Tag::F0) throw Reject{"pair classified F0"};
    const FiniteMeasure rho = build_rho(inst.fbar, label.level, 2048, rng.next_u64(), &inst.ambient);
    auto s = surface_integrals(rho.support, inst.fbar, inst.f);
    // In d = 1 the measure is exact (two atoms of mass 1/2), not sampled.
    if (d == 1) s.lhs_se = s.var_se = 0.0;
    const double dd = static_cast<double>(d);
    const double c = kKeyConstant * std::sqrt(2.0 * dd * dd * dd);
    const double rhs = c * std::sqrt(s.var);
    detail(out, "d", dd);
    detail(out, "level", label.level);
    detail(out, "witness_psi", label.witness);
    detail(out, "lhs", s.lhs);
    detail(out, "rhs", rhs);
    detail(out, "slack_ratio", rhs / s.lhs);
    out.checks.push_back({"per_class", rhs - s.lhs, kSigmaSlack * key_sigma(s, c)});
  });
}

TrialOutcome pipeline_f0(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("pipeline_f0", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(trial % 2);
    const auto inst = level_instance(d, rng, true);
    const ClassLabel label = classify(inst.f, inst.fbar, inst.grid, inst.ambient);
    if (label.tag != ClassLabel::Tag::F0) throw Reject{"pair not in F0"};
    const double alpha = 1.0 / kLabHorizon;
    const double margin = check_inf(inst.fbar, FunctionMeasure::dirac(inst.f),
                                    FiniteMeasure::dirac(*inst.fbar.minimizer()), alpha, 4.0);
    detail(out, "d", static_cast<double>(d));
    detail(out, "fbar_star", *inst.fbar.min_value());
    detail(out, "f_star", *inst.f.min_value());
    out.checks.push_back({"f0_display", margin, 1e-12});
  });
}

// ---- Concave random variables ------------------------------------------------

struct ConcaveInstance {
  ConvexBody a;
  Matrix slopes;   // one piece per row
  Vector offsets;  // phi(x) = min_i slopes.row(i) x + offsets(i)
  std::vector<double> values;
  double max_value = 0.0;
  Eigen::Index ambient_dim = 2;
};

double concave_eval(const ConcaveInstance& c, const Vector& x) {
  return (c.slopes * x + c.offsets).minCoeff();
}

// Min of affine pieces, each nonnegative at every vertex of A, so phi >= 0 on A
// without an explicit clip (a clip at 0 would break concavity).
ConcaveInstance concave_instance(std::uint64_t seed, std::size_t trial) {
  Rng rng(substream_seed(seed, hash_tag("concave"), trial));
  const Eigen::Index k = 1 + static_cast<Eigen::Index>(trial % 2);
  ConcaveInstance c{random_polytope(k, rng), {}, {}, {}, 0.0, k + 1};
  const int pieces = 1 + static_cast<int>(rng.index(4));
  c.slopes.resize(pieces, k);
  c.offsets.resize(pieces);
  for (int i = 0; i < pieces; ++i) {
    const Vector s = rng.normal_vector(k) * rng.uniform(0.0, 2.0);
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& v : c.a.vertices()) lowest = std::min(lowest, s.dot(v));
    c.slopes.row(i) = s.transpose();
    c.offsets[i] = -lowest + (rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 1.0));
  }
  for (int i = 0; i < 10000; ++i) c.values.push_back(concave_eval(c, uniform_in(c.a, rng)));

  // max phi = max t subject to x in A, t <= piece_i(x), t >= 0.
  std::vector<Halfspace> hs;
  for (const auto& h : c.a.halfspaces()) {
    Vector n = Vector::Zero(k + 1);
    n.head(k) = h.normal;
    hs.push_back({n, h.offset});
  }
  for (int i = 0; i < pieces; ++i) {
    Vector n(k + 1);
    n.head(k) = -c.slopes.row(i).transpose();
    n[k] = 1.0;
    const double len = n.norm();
    hs.push_back({n / len, c.offsets[i] / len});
  }
  hs.push_back({-Vector::Unit(k + 1, k), 0.0});
  const auto best = maximize_linear(hs, Vector::Unit(k + 1, k));
  require(best.has_value(), Errc::InvalidArgument, "concave_instance: empty hypograph");
  c.max_value = (*best)[k];
  return c;
}

TrialOutcome concave_mass(std::uint64_t seed, std::size_t trial) {
  TrialOutcome out;
  out.trial = trial;
  const auto c = concave_instance(seed, trial);
  const Sample m = summarize(c.values);
  if (m.mean <= 0.0) {
    out.rejections = 1;
    out.rejection_reasons.push_back("phi vanishes on A");
    return out;
  }
  std::size_t hits = 0;
  for (double v : c.values) hits += (v >= 0.25 * m.mean && v <= 16.0 * m.mean);
  const double n = static_cast<double>(c.values.size());
  const double p = static_cast<double>(hits) / n;
  detail(out, "dim_A", static_cast<double>(c.ambient_dim - 1));
  detail(out, "mass", p);
  out.checks.push_back({"mass", p - 1.0 / 32.0, kSigmaSlack * std::sqrt(p * (1.0 - p) / n)});
  return out;
}

TrialOutcome concave_moments(std::uint64_t seed, std::size_t trial) {
  TrialOutcome out;
  out.trial = trial;
  const auto c = concave_instance(seed, trial);
  const Sample m1 = summarize(c.values);
  if (m1.mean <= 0.0) {
    out.rejections = 1;
    out.rejection_reasons.push_back("phi vanishes on A");
    return out;
  }
  const double kc = std::pow(2.0, 2.5);
  std::vector<double> sq, influence;
  for (double v : c.values) {
    sq.push_back(v * v);
    influence.push_back(2.0 * kc * m1.mean * v - v * v);
  }
  const Sample m2 = summarize(sq);
  const Sample inf = summarize(influence);
  const double d = static_cast<double>(c.ambient_dim);
  detail(out, "mean", m1.mean);
  detail(out, "second_moment", m2.mean);
  detail(out, "max", c.max_value);
  detail(out, "max_over_mean", c.max_value / m1.mean);
  out.checks.push_back({"second_moment", kc * m1.mean * m1.mean - m2.mean, kSigmaSlack * inf.se});
  out.checks.push_back({"max_bound", d * m1.mean - c.max_value, kSigmaSlack * d * m1.se});
  return out;
}

// ---- Positioning ---------------------------------------------------------------

TrialOutcome msa_position(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("msa_position", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(trial % 2);
    const ConvexBody k = random_polytope(d, rng);
    const PositionResult r = msa_transform(k);
    const ConvexBody tk = k.transformed(r.transform);
    const double ratio = shadow_surface_ratio(tk, 1000, rng.next_u64()).max_ratio;
    const double dd = static_cast<double>(d);
    detail(out, "residual", r.residual);
    detail(out, "iterations", r.iterations);
    detail(out, "shadow_ratio", ratio);
    out.checks.push_back({"residual", 1e-6 - r.residual, 0.0});
    out.checks.push_back({"det", -std::abs(r.transform.determinant() - 1.0), kExactTol});
    out.checks.push_back({"shadow_ratio", 2.0 * dd - ratio, 1e-6});
  });
}

// ---- Combining lemma -------------------------------------------------------------

TrialOutcome combine_suite(std::uint64_t seed, std::size_t trial) {
  return attempt_loop("combine", seed, trial, [&](Rng& rng, TrialOutcome& out) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(trial % 2);
    const ConvexBody domain = unit_box(d);
    const Vector lo = Vector::Constant(d, -1.0), hi = Vector::Constant(d, 1.0);
    const double alpha = 1.0 / kLabHorizon;
    const std::size_t k = 1 + rng.index(5);
    const ConvexFunction fbar =
        random_quadratic(d, rng, rng.uniform_box(lo, hi), rng.uniform(0.2, 1.0), 0.3);

    FunctionMeasure mu;
    std::vector<std::size_t> class_of;
    std::vector<FiniteMeasure> rhos;
    double beta = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      FiniteMeasure rho;
      const std::size_t points = 1 + rng.index(6);
      for (std::size_t j = 0; j < points; ++j) {
        rho.support.push_back(rng.uniform_box(lo, hi));
        rho.weights.push_back(rng.uniform(0.1, 1.0));
      }
      const double total = rho.total_mass();
      for (double& w : rho.weights) w /= total;
      const std::size_t atoms = 1 + rng.index(3);
      for (std::size_t j = 0; j < atoms; ++j) {
        ConvexFunction f = with_computed_minimum(
            random_quadratic(d, rng, rng.uniform_box(lo, hi), rng.uniform(0.2, 1.5),
                             rng.uniform(0.0, 0.4)),
            domain);
        beta = std::max(beta, fit_beta(fbar, FunctionMeasure::dirac(f), rho, alpha));
        mu.atoms.push_back(std::move(f));
        mu.weights.push_back(rng.uniform(0.1, 1.0));
        class_of.push_back(i);
      }
      rhos.push_back(std::move(rho));
    }
    const double total = std::accumulate(mu.weights.begin(), mu.weights.end(), 0.0);
    for (double& w : mu.weights) w /= total;
    std::vector<double> q(k, 0.0);
    for (std::size_t j = 0; j < mu.atoms.size(); ++j) q[class_of[j]] += mu.weights[j];
    const double qsum = std::accumulate(q.begin(), q.end(), 0.0);
    for (double& w : q) w /= qsum;
    const FiniteMeasure rho = combine(rhos, q);
    const double margin = check_inf(fbar, mu, rho, alpha, beta * static_cast<double>(k));
    detail(out, "k", static_cast<double>(k));
    detail(out, "beta_class", beta);
    detail(out, "margin", margin);
    out.checks.push_back({"combined", margin, kExactTol});
  });
}

// ---- Reduction -------------------------------------------------------------------

TrialOutcome lift(std::uint64_t seed, std::size_t trial) {
  TrialOutcome out;
  out.trial = trial;
  Rng rng(substream_seed(seed, hash_tag("lift"), trial));
  const int n = 200;
  const ConvexBody domain = ConvexBody::interval(-1.0, 1.0);
  const auto atom = ids::random_prior_atom(rng, domain, n);
  const auto audit = ids::audit_lift(atom, domain, n, 10000, rng.next_u64());
  detail(out, "modulus", audit.modulus);
  detail(out, "max_gradient", audit.max_gradient);
  out.checks.push_back({"secant_strong_convexity", audit.worst_secant_margin, 1e-14});
  out.checks.push_back({"lipschitz", static_cast<double>(n) - audit.max_gradient, 0.0});
  return out;
}

}  // namespace

const std::vector<Property>& properties() {
  static const std::vector<Property> all = {
      {"psi_invariance", psi_invariance, 1000, "abs:1e-09", "pointwise invariance under linear maps"},
      {"psi_concavity", psi_concavity, 10000, "abs:1e-09", "midpoint concavity on the shadow"},
      {"psi_monotone", psi_monotone, 1000, "3se", "monotonicity under dilation"},
      {"psi_sandwich", psi_sandwich, 1000, "3se", "ratio window for nested bodies"},
      {"los", los, 10000, "abs:1e-09", "line-of-sight squared-gap inequality"},
      {"key", key, 200, "3se", "surface-measure inequality on in-window level sets"},
      {"concave_mass", concave_mass, 1000, "3se", "mass of concave variables near the mean"},
      {"concave_moments", concave_moments, 1000, "3se", "second moment and maximum bounds"},
      {"msa_position", msa_position, 100, "abs:1e-06", "isotropy residual and shadow ratio"},
      {"pipeline_feps", pipeline_feps, 100, "3se", "per-class display for F_eps pairs"},
      {"pipeline_f0", pipeline_f0, 100, "abs:1e-12", "Dirac display for F0 pairs"},
      {"combine", combine_suite, 100, "abs:1e-09", "combined measure with beta times k"},
      {"lift", lift, 8, "abs:1e-14", "lifted losses: strong convexity and Lipschitz bound"},
  };
  return all;
}

const Property& property(const std::string& id) {
  for (const auto& p : properties())
    if (p.id == id) return p;
  throw Error(Errc::InvalidArgument, "unknown property: " + id);
}

void override_tolerance(TrialOutcome& t, double tol) {
  for (auto& c : t.checks) c.tolerance = tol;
}

std::string tolerance_label(double tol) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "abs:%g", tol);
  return buf;
}

VerificationReport run_property(const std::string& id, std::size_t trials, std::uint64_t seed,
                                unsigned jobs, std::optional<double> tol) {
  const Property& prop = property(id);
  std::vector<TrialOutcome> outcomes(trials);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < trials; ++i) outcomes[i] = prop.fn(seed, i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        try {
          for (std::size_t i = j; i < trials; i += jobs) outcomes[i] = prop.fn(seed, i);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  VerificationReport r;
  r.property = id;
  r.trials = trials;
  r.seed = seed;
  r.tolerance = tol ? tolerance_label(*tol) : prop.tolerance;
  r.worst_margin = std::numeric_limits<double>::infinity();
  std::map<std::string, std::pair<double, double>> ranges;
  std::vector<std::string> order;
  for (auto& t : outcomes) {
    if (tol) override_tolerance(t, *tol);
    r.rejections += t.rejections;
    if (t.failed()) ++r.failures;
    const double w = t.worst_margin();
    if (w < r.worst_margin) r.worst_margin = w, r.worst_trial = t.trial;
    for (const auto& [name, v] : t.details) {
      auto [it, fresh] = ranges.try_emplace(name, v, v);
      if (fresh) order.push_back(name);
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }
  for (const auto& name : order) r.detail_ranges.emplace_back(name, ranges[name]);
  return r;
}

TrialOutcome replay_trial(const std::string& id, std::uint64_t seed, std::size_t trial,
                          std::optional<double> tol) {
  TrialOutcome t = property(id).fn(seed, trial);
  if (tol) override_tolerance(t, *tol);
  return t;
}

std::string csv_header() {
  return "property,trials,failures,worst_margin,seed,rejections,tolerance,generator";
}

std::string csv_row(const VerificationReport& r) {
  char margin[64];
  std::snprintf(margin, sizeof margin, "%.17g", r.worst_margin);
  std::ostringstream os;
  os << r.property << ',' << r.trials << ',' << r.failures << ',' << margin << ',' << r.seed << ','
     << r.rejections << ',' << r.tolerance << ',' << kGeneratorVersion;
  return os.str();
}

void print_outcome(std::ostream& os, const std::string& id, const TrialOutcome& t) {
  os << "property " << id << " trial " << t.trial << "\n";
  os << "rejected draws: " << t.rejections << "\n";
  for (const auto& why : t.rejection_reasons) os << "  rejected: " << why << "\n";
  for (const auto& [name, v] : t.details) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << "  " << name << " = " << buf << "\n";
  }
  for (const auto& c : t.checks) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g (tolerance %.3g)", c.margin, c.tolerance);
    os << "  check " << c.name << ": margin " << buf << (c.failed() ? " FAIL" : " ok") << "\n";
  }
  os << (t.failed() ? "FAIL" : "PASS") << "\n";
}

}  // namespace bcolab::lab
