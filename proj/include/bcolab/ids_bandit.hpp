#pragma once

#include "bcolab/body.hpp"
#include "bcolab/convex_function.hpp"
#include "bcolab/explore.hpp"
#include "bcolab/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bcolab::ids {

/// Finite net of the action body with nearest-point projection.
struct CoverNet {
  std::vector<Vector> points;
  double radius = 0.0;

  std::size_t size() const { return points.size(); }
  /// Index of the nearest cover point; ties go to the lowest index.
  std::size_t project(const Vector& x) const;
  /// d log(3 diam / radius), the logarithmic size bound.
  double log_size_bound(double diam) const;
};

inline constexpr std::size_t kCoverCap = 1'000'000;

/// Axis-aligned grid of pitch radius / sqrt(d) spanning the bounding box,
/// restricted to the body, plus projections onto the body of outside grid
/// points within `radius`. Singleton when radius >= diam. Throws
/// CoverTooLarge above `cap` points.
CoverNet build_cover(const ConvexBody& body, double radius, std::size_t cap = kCoverCap);

/// Cover radius 1 / (n^2 max(1, sqrt(2 beta))).
double default_cover_radius(int n, double beta);

/// (n / (n + 1)) (f(x) + |x|^2 / (n diam^2)).
ConvexFunction lift_loss(const ConvexFunction& f, int n, double diam);
/// 1 / ((n + 1) diam^2), the modulus guaranteed for lifted losses.
double lifted_modulus(int n, double diam);

/// {x in body : dist(x, boundary) >= 1/n} for polytopes and balls. Throws
/// EmptyInset when the inset has empty interior.
ConvexBody shrink_domain(const ConvexBody& body, int n);

struct LiftAudit {
  double modulus = 0.0;
  double worst_secant_margin = 0.0;  // min over pairs, >= 0 means pass
  double max_gradient = 0.0;
};

/// Secant strong-convexity and sampled-gradient Lipschitz checks of the lifted
/// atom on the inset domain.
LiftAudit audit_lift(const ConvexFunction& atom, const ConvexBody& domain, int n,
                     std::size_t pairs, std::uint64_t seed);

/// A quadratic a (x - c)^2 + b on the interval domain with values in [0, 1].
ConvexFunction random_prior_atom(Rng& rng, const ConvexBody& domain, int n);

/// Finitely supported prior over loss sequences. A stationary atom holds one
/// function used in every round.
struct Prior {
  std::vector<std::vector<ConvexFunction>> atoms;
  std::vector<double> weights;

  const ConvexFunction& loss(std::size_t atom, std::size_t round) const {
    const auto& seq = atoms[atom];
    return seq.size() == 1 ? seq.front() : seq[round];
  }
  bool stationary() const;
};

/// Loss table of every atom on the cover: values[atom](round, point), with a
/// single row for stationary atoms.
struct LossTable {
  std::vector<Matrix> values;
  std::vector<std::size_t> ystar;  // cover index minimizing cumulative loss

  double at(std::size_t atom, std::size_t round, std::size_t point) const {
    const Matrix& m = values[atom];
    return m(m.rows() == 1 ? 0 : static_cast<Eigen::Index>(round), static_cast<Eigen::Index>(point));
  }
};

LossTable tabulate(const Prior& prior, const CoverNet& cover, int n);

/// Zeroes atoms whose loss at `point` differs from `observed` by more than
/// tol * max(1, |observed|) and renormalizes. Throws EmptyPosterior.
std::vector<double> posterior_update(const std::vector<double>& weights, const LossTable& table,
                                     std::size_t round, std::size_t point, double observed,
                                     double tol = 1e-9);

struct PosteriorGroup {
  std::size_t ystar = 0;
  double mass = 0.0;
  Vector values;  // f_{t,y} on the cover
};

struct PosteriorStats {
  Vector fbar;  // on the cover
  std::vector<PosteriorGroup> groups;
  double optimal_loss = 0.0;  // sum_y mu(y) f_{t,y}(y)
  double tower_error = 0.0;   // max_x |sum_y mu(y) f_{t,y}(x) - fbar(x)|
};

PosteriorStats posterior_stats(const std::vector<double>& weights, const LossTable& table,
                               std::size_t round);

double entropy(const std::vector<double>& weights);

enum class Mode { Constructed, IdsOpt };
Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

struct ActionDist {
  std::vector<std::size_t> support;  // cover indices
  std::vector<double> weights;
  double delta = 0.0;  // sum xi fbar - optimal_loss
  double v = 0.0;      // sum_y mu(y) sum_x xi(x) (fbar(x) - f_{t,y}(x))^2
  bool zero_information = false;
};

/// Information-ratio minimizer over distributions supported on at most two
/// cover points. Exhaustive over pairs for covers up to 1000 points; larger
/// covers search the vertices and edges of the convex hull of the points
/// (delta_x, v_x), where delta^2 / v attains its minimum over all mixtures.
ActionDist ids_opt(const PosteriorStats& stats);

/// Evaluates delta and v of a distribution over cover indices.
ActionDist evaluate(const PosteriorStats& stats, std::vector<std::size_t> support,
                    std::vector<double> weights);

/// Pushes a measure on the body to the cover through its projection.
ActionDist push_forward(const FiniteMeasure& rho, const CoverNet& cover, const PosteriorStats& stats);

struct EpisodeConfig {
  int n = 200;
  Mode mode = Mode::IdsOpt;
  double alpha = -1.0;      // negative selects 1/n
  double tol = 1e-9;
  ExploreOptions explore;   // constructed mode
};

struct TraceRow {
  std::size_t round = 0;
  std::size_t action_index = 0;
  double loss = 0.0;
  double delta = 0.0;
  double v = 0.0;
  double entropy = 0.0;
  double cum_regret = 0.0;
  double beta_hat = 0.0;
};

struct EpisodeTrace {
  std::vector<TraceRow> rows;
  std::size_t truth = 0;
  std::size_t ystar = 0;
  double regret = 0.0;
  double sum_2v = 0.0;
  double beta_hat = 0.0;  // max over rounds of the fitted beta
  double max_tower_error = 0.0;
  std::size_t zero_information_rounds = 0;
  std::size_t support_final = 0;
};

/// One Bayesian episode: the true atom is drawn from the prior, then n rounds
/// of action selection, deterministic loss observation and conditioning.
EpisodeTrace run_episode(const Prior& prior, const CoverNet& cover, const ConvexBody& domain,
                         const EpisodeConfig& cfg, std::uint64_t seed);

/// 3 + n alpha + sqrt(beta d n log(3 n^2 max(1, sqrt(2 beta)) diam)).
double regret_bound(double n, double d, double alpha, double beta, double diam);

/// 2 + n alpha + sqrt(n beta log|C|), the bound in terms of the cover size.
double cover_regret_bound(double n, double alpha, double beta, double cover_size);

/// Stationary prior of `atoms` lifted quadratics with equal weights on the
/// interval domain; raw atoms are drawn with random_prior_atom.
Prior quadratic_prior(const ConvexBody& domain, int atoms, int n, std::uint64_t seed);

/// Sequence prior: each atom's centre drifts by a seeded random walk.
Prior drifting_prior(const ConvexBody& domain, int atoms, int n, std::uint64_t seed);

struct SweepConfig {
  int d = 1;
  int n = 200;
  int atoms = 8;
  std::size_t seeds = 100;
  std::uint64_t seed = 0;
  Mode mode = Mode::IdsOpt;
  double cover_radius = 0.0;  // 0 selects default_cover_radius(n, beta)
  double beta = 0.0;          // for the default radius; 0 runs a pilot fit first
  bool sequence_prior = false;
  unsigned jobs = 1;
  ExploreOptions explore;
};

struct SweepSummary {
  std::size_t seeds = 0;
  double mean_regret = 0.0;
  double regret_se = 0.0;
  double bound_value = 0.0;  // cover_regret_bound with alpha = 1/n and beta_hat
  double beta_hat = 0.0;
  std::size_t cover_size = 0;
  double cover_radius = 0.0;
  double mean_sum_2v = 0.0;
  double sum_2v_se = 0.0;
  double log_cover = 0.0;
  double pilot_beta = 0.0;
  std::vector<EpisodeTrace> traces;
};

SweepSummary run_sweep(const SweepConfig& cfg);

std::string trace_csv_header();
void write_trace_csv(std::ostream& os, const EpisodeTrace& trace);

}  // namespace bcolab::ids
