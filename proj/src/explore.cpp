#include "bcolab/explore.hpp"

#include "bcolab/error.hpp"
#include "bcolab/hull.hpp"
#include "bcolab/msa.hpp"
#include "bcolab/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace bcolab {

FiniteMeasure FiniteMeasure::dirac(const Vector& x) { return {{x}, {1.0}}; }

FiniteMeasure FiniteMeasure::uniform(std::vector<Vector> points) {
  require(!points.empty(), Errc::InvalidArgument, "FiniteMeasure::uniform: no points");
  const double w = 1.0 / static_cast<double>(points.size());
  std::vector<double> weights(points.size(), w);
  return {std::move(points), std::move(weights)};
}

double FiniteMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double FiniteMeasure::expect(const std::function<double(const Vector&)>& g) const {
  double s = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) s += weights[i] * g(support[i]);
  return s;
}

Vector FiniteMeasure::mean() const {
  Vector m = Vector::Zero(support.front().size());
  for (std::size_t i = 0; i < support.size(); ++i) m += weights[i] * support[i];
  return m;
}

void FiniteMeasure::validate() const {
  require(!support.empty() && support.size() == weights.size(), Errc::MassMismatch,
          "FiniteMeasure: support and weights differ in length");
  for (double w : weights) require(w >= 0.0, Errc::MassMismatch, "FiniteMeasure: negative weight");
  require(std::abs(total_mass() - 1.0) <= 1e-12, Errc::MassMismatch,
          "FiniteMeasure: weights do not sum to 1");
}

FunctionMeasure FunctionMeasure::dirac(const ConvexFunction& f) { return {{f}, {1.0}}; }

void FunctionMeasure::validate() const {
  require(!atoms.empty() && atoms.size() == weights.size(), Errc::MassMismatch,
          "FunctionMeasure: atoms and weights differ in length");
  double s = 0.0;
  for (double w : weights) {
    require(w >= 0.0, Errc::MassMismatch, "FunctionMeasure: negative weight");
    s += w;
  }
  require(std::abs(s - 1.0) <= 1e-12, Errc::MassMismatch, "FunctionMeasure: weights do not sum to 1");
}

std::optional<std::size_t> EpsilonGrid::snap_down(double eps) const {
  auto it = std::upper_bound(levels.begin(), levels.end(), eps);
  if (it == levels.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(levels.begin(), it) - 1);
}

EpsilonGrid epsilon_grid(int d, int n, double m) {
  require(d >= 1 && n >= 1 && m > 0.0, Errc::InvalidArgument, "epsilon_grid: need d, n >= 1, m > 0");
  EpsilonGrid g;
  g.d = d;
  g.n = n;
  g.m = m;
  const double dd = d, nn = n;
  g.eps0 = m / (std::ldexp(1.0, 17) * dd * dd * nn * nn * nn * nn);
  g.gamma = 1.0 + 1.0 / (9.0 * dd);
  if (g.eps0 >= 1.0) {
    g.levels = {1.0};
    return g;
  }
  for (double e = g.eps0; e <= 1.0; e *= g.gamma) g.levels.push_back(e);
  return g;
}

double psi_target(Eigen::Index d) { return 1.0 / (64.0 * static_cast<double>(d)); }
double psi_window_low(Eigen::Index d) { return 1.0 / (128.0 * static_cast<double>(d)); }
double psi_window_high(Eigen::Index d) { return 1.0 / (32.0 * static_cast<double>(d)); }

std::size_t default_rays(Eigen::Index d) {
  switch (d) {
    case 1: return 2;
    case 2: return 64;
    default: return 512;
  }
}

namespace {

std::vector<Vector> direction_grid(Eigen::Index d, std::size_t rays) {
  std::vector<Vector> dirs;
  if (d == 1) return {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
  if (d == 2) {
    for (std::size_t k = 0; k < rays; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(rays);
      dirs.push_back(Vector{{std::cos(a), std::sin(a)}});
    }
    return dirs;
  }
  // Fibonacci sphere.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < rays; ++k) {
    const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(rays);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * static_cast<double>(k);
    dirs.push_back(Vector{{r * std::cos(a), r * std::sin(a), z}});
  }
  return dirs;
}

void require_minimum(const ConvexFunction& f, const char* what) {
  require(f.minimizer().has_value() && f.min_value().has_value(), Errc::MissingMinValue,
          std::string(what) + ": minimizer and minimum value are required");
}

}  // namespace

ConvexBody level_set(const ConvexFunction& fbar, double eps, std::size_t rays,
                     const ConvexBody* ambient) {
  require_minimum(fbar, "level_set");
  require(eps > 0.0, Errc::InvalidArgument, "level_set: eps must be positive");
  const Vector& xs = *fbar.minimizer();
  const auto d = xs.size();
  const double level = *fbar.min_value() + eps;
  require(level > *fbar.min_value(), Errc::EpsTooSmall, "level_set: eps below working precision");
  if (rays == 0) rays = default_rays(d);

  double reach = std::numeric_limits<double>::infinity();
  if (fbar.strong_convexity() > 0.0) reach = 2.0 * std::sqrt(2.0 * eps / fbar.strong_convexity());
  require(ambient || std::isfinite(reach), Errc::InvalidArgument,
          "level_set: need an ambient body or a positive strong-convexity modulus");

  std::vector<Vector> points;
  bool touches_minimizer = false;
  double longest = 0.0;
  for (const auto& u : direction_grid(d, rays)) {
    double t_max = reach;
    if (ambient) t_max = std::min(t_max, std::max(0.0, ray_clip(*ambient, xs, u).t_out));
    double t = t_max;
    if (fbar(xs + t_max * u) > level) {
      double lo = 0.0, hi = t_max;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (fbar(xs + mid * u) <= level ? lo : hi) = mid;
      }
      t = lo;
    }
    if (t <= 0.0) touches_minimizer = true;
    longest = std::max(longest, t);
    points.push_back(xs + t * u);
  }
  require(longest > 0.0, Errc::EpsTooSmall, "level_set: no ray separates from the minimizer");
  if (touches_minimizer) points.push_back(xs);
  if (d == 1) {
    double lo = points[0][0], hi = points[0][0];
    for (const auto& p : points) lo = std::min(lo, p[0]), hi = std::max(hi, p[0]);
    require(hi > lo, Errc::EpsTooSmall, "level_set: degenerate interval");
    return ConvexBody::interval(lo, hi);
  }
  try {
    auto rep = polytope_from_points(points);
    return ConvexBody::polytope(std::move(rep.halfspaces), std::move(rep.vertices));
  } catch (const Error& e) {
    throw Error(Errc::EpsTooSmall, std::string("level_set: degenerate hull: ") + e.what());
  }
}

PsiReport level_set_psi(const ConvexFunction& fbar, double eps, const Vector& x,
                        const ConvexBody* ambient, std::size_t rays, std::size_t samples,
                        std::uint64_t seed) {
  const Vector& xs = *fbar.minimizer();
  const ConvexBody k = level_set(fbar, eps, rays, ambient).translated(-xs);
  return psi_avg(k, x - xs, samples, seed);
}

ClassLabel classify(const ConvexFunction& f, const ConvexFunction& fbar, const EpsilonGrid& grid,
                    const ConvexBody& ambient, const ClassifyOptions& opts) {
  require_minimum(f, "classify");
  require_minimum(fbar, "classify");
  const double fbar_star = *fbar.min_value();
  const double f_star = *f.min_value();
  const Vector& xbar = *fbar.minimizer();
  const Vector& xf = *f.minimizer();
  const auto d = xbar.size();
  ClassLabel label;
  if (f_star >= fbar_star - 1.0 / grid.n || fbar_star - f_star <= 2.0 * (fbar_star - f(xbar))) {
    return label;
  }

  const double target = psi_target(d);
  const double gap = fbar(xf) - fbar_star;
  require(gap > 0.0, Errc::BisectionFailure, "classify: f's minimizer lies in every level set");
  const std::size_t rays = opts.rays ? opts.rays : default_rays(d);
  auto psi_at = [&](double eps) {
    return level_set_psi(fbar, eps, xf, &ambient, rays, opts.samples, opts.seed).avg_value;
  };

  double hi = std::min(1.0, gap * (1.0 - 1e-9));
  double lo = std::min(grid.eps0, hi * 1e-6);
  require(psi_at(lo) < target, Errc::BisectionFailure,
          "classify: ratio exceeds the target already at the smallest eps");
  require(psi_at(hi) >= target, Errc::BisectionFailure,
          "classify: ratio stays below the target before the minimizer enters the level set");
  double log_lo = std::log(lo), log_hi = std::log(hi);
  int steps = 0;
  while (steps < opts.max_steps && log_hi - log_lo > opts.log_tol) {
    const double mid = 0.5 * (log_lo + log_hi);
    (psi_at(std::exp(mid)) < target ? log_lo : log_hi) = mid;
    ++steps;
  }
  label.epsilon = std::exp(0.5 * (log_lo + log_hi));
  label.bisection_steps = steps;

  const auto idx = grid.snap_down(label.epsilon);
  require(idx.has_value(), Errc::WindowMiss, "classify: solution below the smallest grid level");
  label.tag = ClassLabel::Tag::Feps;
  label.level_index = *idx;
  label.level = grid.levels[*idx];
  label.witness = psi_at(label.level);
  if (opts.check_window) {
    require(label.witness >= psi_window_low(d) && label.witness <= psi_window_high(d),
            Errc::WindowMiss,
            "classify: witness " + std::to_string(label.witness) + " outside the ratio window");
  }
  return label;
}

FiniteMeasure build_rho(const ConvexFunction& fbar, double eps, std::size_t samples,
                        std::uint64_t seed, const ConvexBody* ambient, std::size_t rays) {
  require_minimum(fbar, "build_rho");
  require(samples >= 1, Errc::InvalidArgument, "build_rho: samples must be positive");
  const ConvexBody k = level_set(fbar, eps, rays, ambient);
  const auto d = k.dim();
  if (d == 1) return {{k.bbox_lo(), k.bbox_hi()}, {0.5, 0.5}};

  const Vector& xs = *fbar.minimizer();
  const double s = 1.0 / (k.bbox_hi() - k.bbox_lo()).maxCoeff();
  const ConvexBody unit = k.translated(-xs).scaled(s);
  const Matrix t = msa_transform_strict(unit, 1e-6, 2000).transform;
  const SurfaceMeasure sm = surface_measure(unit.transformed(t));
  const Matrix back = t.inverse() / s;

  Rng rng(seed, "rho");
  std::vector<Vector> pts;
  pts.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) pts.push_back(xs + back * sample_boundary(sm, rng));
  return FiniteMeasure::uniform(std::move(pts));
}

FiniteMeasure combine(const std::vector<FiniteMeasure>& rhos, const std::vector<double>& q) {
  require(!rhos.empty() && rhos.size() == q.size(), Errc::MassMismatch,
          "combine: measures and masses differ in length");
  double total = 0.0;
  for (double w : q) {
    require(w >= 0.0, Errc::MassMismatch, "combine: negative class mass");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12, Errc::MassMismatch, "combine: masses do not sum to 1");
  FiniteMeasure out;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    for (std::size_t j = 0; j < rhos[i].size(); ++j) {
      out.support.push_back(rhos[i].support[j]);
      out.weights.push_back(q[i] * rhos[i].weights[j]);
    }
  }
  return out;
}

InfTerms inf_terms(const ConvexFunction& fbar, const FunctionMeasure& mu, const FiniteMeasure& rho) {
  InfTerms t;
  std::vector<double> fbar_at(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) {
    fbar_at[j] = fbar(rho.support[j]);
    t.lhs += rho.weights[j] * fbar_at[j];
  }
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    const auto& f = mu.atoms[i];
    require(f.min_value().has_value(), Errc::MissingMinValue, "check_inf: atom without minimum");
    t.lhs -= mu.weights[i] * *f.min_value();
    double v = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
      const double gap = fbar_at[j] - f(rho.support[j]);
      v += rho.weights[j] * gap * gap;
    }
    t.variance += mu.weights[i] * v;
  }
  return t;
}

double check_inf(const ConvexFunction& fbar, const FunctionMeasure& mu, const FiniteMeasure& rho,
                 double alpha, double beta) {
  const auto t = inf_terms(fbar, mu, rho);
  return alpha + std::sqrt(beta * t.variance) - t.lhs;
}

double fit_beta(const InfTerms& terms, double alpha) {
  const double excess = std::max(0.0, terms.lhs - alpha);
  if (excess == 0.0) return 0.0;
  require(terms.variance > 0.0, Errc::ZeroVariance, "fit_beta: zero variance with lhs above alpha");
  return excess * excess / terms.variance;
}

double fit_beta(const ConvexFunction& fbar, const FunctionMeasure& mu, const FiniteMeasure& rho,
                double alpha) {
  return fit_beta(inf_terms(fbar, mu, rho), alpha);
}

Exploration explore(const ConvexFunction& fbar, const FunctionMeasure& mu, const EpsilonGrid& grid,
                    const ConvexBody& ambient, const ExploreOptions& opts) {
  mu.validate();
  require_minimum(fbar, "explore");
  Exploration out;
  ClassifyOptions copts = opts.classify;
  copts.check_window = false;

  // Class key: -1 for the Dirac class, otherwise the grid level index.
  std::map<long, int> class_of_key;
  std::vector<long> keys;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    ClassLabel label;
    long key = -1;
    try {
      label = classify(mu.atoms[i], fbar, grid, ambient, copts);
      if (label.tag == ClassLabel::Tag::Feps) key = static_cast<long>(label.level_index);
    } catch (const Error& e) {
      if (e.code() != Errc::BisectionFailure && e.code() != Errc::WindowMiss) throw;
      ++out.unclassified;
    }
    auto [it, fresh] = class_of_key.try_emplace(key, static_cast<int>(keys.size()));
    if (fresh) {
      keys.push_back(key);
      out.class_masses.push_back(0.0);
    }
    out.class_masses[it->second] += mu.weights[i];
    out.atom_class.push_back(it->second);
    out.labels.push_back(label);
  }
  for (long key : keys) {
    if (key < 0) {
      out.class_rhos.push_back(FiniteMeasure::dirac(*fbar.minimizer()));
    } else {
      const auto idx = static_cast<std::size_t>(key);
      out.class_rhos.push_back(build_rho(fbar, grid.levels[idx], opts.rho_samples,
                                         substream_seed(copts.seed, hash_tag("class"), idx),
                                         &ambient, copts.rays));
    }
  }
  // Renormalize against rounding in the accumulated class masses.
  double total = 0.0;
  for (double q : out.class_masses) total += q;
  for (double& q : out.class_masses) q /= total;
  out.rho = combine(out.class_rhos, out.class_masses);
  return out;
}

}  // namespace bcolab
