#pragma once

#include "bcolab/body.hpp"
#include "bcolab/convex_function.hpp"
#include "bcolab/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bcolab {

/// Finitely supported probability measure on R^d.
struct FiniteMeasure {
  std::vector<Vector> support;
  std::vector<double> weights;

  static FiniteMeasure dirac(const Vector& x);
  static FiniteMeasure uniform(std::vector<Vector> points);

  std::size_t size() const { return support.size(); }
  double total_mass() const;
  double expect(const std::function<double(const Vector&)>& g) const;
  Vector mean() const;
  /// Throws MassMismatch unless weights are nonnegative and sum to 1 (1e-12).
  void validate() const;
};

/// Finitely supported probability measure over convex functions.
struct FunctionMeasure {
  std::vector<ConvexFunction> atoms;
  std::vector<double> weights;

  static FunctionMeasure dirac(const ConvexFunction& f);
  void validate() const;
};

/// Geometric grid eps0 * gamma^k inside (0, 1], with eps0 = m / (2^17 d^2 n^4)
/// and gamma = 1 + 1/(9d).
struct EpsilonGrid {
  int d = 1;
  int n = 1;
  double m = 0.0;
  double eps0 = 0.0;
  double gamma = 1.0;
  std::vector<double> levels;

  /// Largest level <= eps; nullopt when eps is below the grid.
  std::optional<std::size_t> snap_down(double eps) const;
};

EpsilonGrid epsilon_grid(int d, int n, double m);

/// Ratio targets of the classification step.
double psi_target(Eigen::Index d);        // 1/(64d)
double psi_window_low(Eigen::Index d);    // 1/(128d)
double psi_window_high(Eigen::Index d);   // 1/(32d)

struct ClassLabel {
  enum class Tag { F0, Feps };
  Tag tag = Tag::F0;
  std::size_t level_index = 0;  // into EpsilonGrid::levels, Feps only
  double level = 0.0;           // delta
  double epsilon = 0.0;         // bisection solution before snapping
  double witness = 0.0;         // Psi_{K_delta}(x*) for Feps
  int bisection_steps = 0;

  std::string tag_name() const { return tag == Tag::F0 ? "F0" : "F_eps"; }
};

/// Default level-set resolution: 2 rays for d = 1, 64 for d = 2, 512 for d = 3.
std::size_t default_rays(Eigen::Index d);

/// Polytope approximation of {x : fbar(x) <= fbar* + eps}: bisection from the
/// minimizer along a deterministic direction grid, each ray clipped by the
/// ambient body when one is given. Without an ambient body fbar must have a
/// positive strong-convexity modulus.
ConvexBody level_set(const ConvexFunction& fbar, double eps, std::size_t rays,
                     const ConvexBody* ambient = nullptr);

struct ClassifyOptions {
  std::size_t samples = 4096;   // Monte Carlo size of each ratio evaluation
  std::uint64_t seed = 0;       // common random numbers across eps
  std::size_t rays = 0;         // 0 selects default_rays(d)
  int max_steps = 80;           // bisection steps on log eps
  double log_tol = 1e-4;        // early stop once the log-bracket is this narrow
  bool check_window = true;     // raise WindowMiss outside [1/(128d), 1/(32d)]
};

/// Averaged ratio of the level set K_eps of fbar seen from `x`, in
/// coordinates centred at fbar's minimizer.
PsiReport level_set_psi(const ConvexFunction& fbar, double eps, const Vector& x,
                        const ConvexBody* ambient, std::size_t rays, std::size_t samples,
                        std::uint64_t seed);

/// F0 when f* >= fbar* - 1/n or fbar* - f* <= 2 (fbar* - f(xbar*)); otherwise
/// solves Psi_{K_eps}(x*) = 1/(64d) by bisection on log eps and snaps the
/// solution down to the grid.
ClassLabel classify(const ConvexFunction& f, const ConvexFunction& fbar, const EpsilonGrid& grid,
                    const ConvexBody& ambient, const ClassifyOptions& opts = {});

/// Pullback of the normalized surface area measure of the minimal surface area
/// position of K_eps, as an equal-weight empirical measure with `samples`
/// atoms. In d = 1 the two endpoints with weight 1/2 each.
FiniteMeasure build_rho(const ConvexFunction& fbar, double eps, std::size_t samples,
                        std::uint64_t seed, const ConvexBody* ambient = nullptr,
                        std::size_t rays = 0);

/// Mixture sum_i q_i rho_i. Throws MassMismatch on bad masses.
FiniteMeasure combine(const std::vector<FiniteMeasure>& rhos, const std::vector<double>& q);

/// The two sides of the exploratory condition.
struct InfTerms {
  double lhs = 0.0;       // sum rho fbar - sum mu f*
  double variance = 0.0;  // sum_f sum_x mu(f) rho(x) (fbar(x) - f(x))^2
};

InfTerms inf_terms(const ConvexFunction& fbar, const FunctionMeasure& mu, const FiniteMeasure& rho);

/// alpha + sqrt(beta * variance) - lhs. Throws MissingMinValue when an atom
/// of mu has no recorded minimum.
double check_inf(const ConvexFunction& fbar, const FunctionMeasure& mu, const FiniteMeasure& rho,
                 double alpha, double beta);

/// Smallest beta with nonnegative margin. Throws ZeroVariance when the
/// variance vanishes and lhs > alpha.
double fit_beta(const ConvexFunction& fbar, const FunctionMeasure& mu, const FiniteMeasure& rho,
                double alpha);
double fit_beta(const InfTerms& terms, double alpha);

/// End-to-end exploratory distribution for (fbar, mu): classify each atom,
/// build one measure per class (Dirac at fbar's minimizer for F0, the level
/// set measure for F_eps(delta)) and mix with the class masses.
struct Exploration {
  FiniteMeasure rho;
  std::vector<ClassLabel> labels;          // per atom of mu
  std::vector<int> atom_class;             // index into classes, per atom
  std::vector<double> class_masses;
  std::vector<FiniteMeasure> class_rhos;
  std::size_t unclassified = 0;            // atoms whose bisection failed
};

struct ExploreOptions {
  ClassifyOptions classify;
  std::size_t rho_samples = 256;
};

Exploration explore(const ConvexFunction& fbar, const FunctionMeasure& mu, const EpsilonGrid& grid,
                    const ConvexBody& ambient, const ExploreOptions& opts = {});

}  // namespace bcolab
