#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bcolab::lab {

/// Bumped whenever an instance generator changes; replays of older artifacts
/// are refused.
inline constexpr const char* kGeneratorVersion = "lab-1";

/// Absolute tolerance for assertions evaluated with exact geometry.
inline constexpr double kExactTol = 1e-9;
/// Number of Monte Carlo standard errors granted to sampled assertions.
inline constexpr double kSigmaSlack = 3.0;

/// One assertion inside a trial: it fails when margin < -tolerance.
struct Check {
  std::string name;
  double margin = 0.0;
  double tolerance = 0.0;

  bool failed() const { return margin < -tolerance; }
};

/// Everything one trial produced. Rejected draws are resampled from the next
/// attempt substream and counted.
struct TrialOutcome {
  std::size_t trial = 0;
  std::size_t rejections = 0;
  std::vector<std::string> rejection_reasons;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> details;  // verbose quantities for replay

  bool failed() const;
  double worst_margin() const;
};

struct VerificationReport {
  std::string property;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::size_t rejections = 0;
  double worst_margin = 0.0;
  std::size_t worst_trial = 0;
  std::uint64_t seed = 0;
  std::string tolerance;  // "abs:1e-09" or "3se"
  /// min and max over trials of every recorded detail, by name
  std::vector<std::pair<std::string, std::pair<double, double>>> detail_ranges;

  bool passed() const { return failures == 0; }
};

using TrialFn = TrialOutcome (*)(std::uint64_t seed, std::size_t trial);

struct Property {
  std::string id;
  TrialFn fn;
  std::size_t default_trials;
  std::string tolerance;
  std::string summary;
};

/// All registered properties, in report order.
const std::vector<Property>& properties();
const Property& property(const std::string& id);

/// Runs `trials` trials on `jobs` threads. Per-trial substreams depend only on
/// (seed, property, trial), so the report does not depend on `jobs`. A given
/// `tol` replaces every check tolerance; margins are unaffected.
VerificationReport run_property(const std::string& id, std::size_t trials, std::uint64_t seed,
                                unsigned jobs = 1, std::optional<double> tol = std::nullopt);

/// Re-executes one trial.
TrialOutcome replay_trial(const std::string& id, std::uint64_t seed, std::size_t trial,
                          std::optional<double> tol = std::nullopt);

void override_tolerance(TrialOutcome& t, double tol);
std::string tolerance_label(double tol);

/// CSV header and row: property,trials,failures,worst_margin,seed followed by
/// rejections,tolerance,generator.
std::string csv_header();
std::string csv_row(const VerificationReport& r);

void print_outcome(std::ostream& os, const std::string& id, const TrialOutcome& t);

}  // namespace bcolab::lab
