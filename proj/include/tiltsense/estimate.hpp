#pragma once

#include <cstdint>
#include <vector>

#include "tiltsense/model.hpp"
#include "tiltsense/rng.hpp"

namespace tiltsense {

/// nu single-photon detections. Positions are stored only for continuous
/// models; label_counts always holds the per-label tally.
struct OutcomeBatch {
  std::vector<double> x;
  std::vector<std::int8_t> label;
  std::vector<std::uint64_t> label_counts;

  std::size_t size() const { return label.size(); }
  Outcome at(const ProbabilityModel& model, std::size_t i) const;
};

/// Draws nu outcomes at theta. Discrete models use the inverse CDF over
/// labels; continuous models use their exact Gaussian mixture when one is
/// exposed and otherwise rejection sampling against the model's envelope.
/// Throws NumericalError if rejection efficiency falls below 1%.
OutcomeBatch sample_outcomes(const ProbabilityModel& model, double theta, std::uint64_t nu,
                             CounterRng& rng);
OutcomeBatch sample_outcomes(const ProbabilityModel& model, double theta, std::uint64_t nu,
                             std::uint64_t seed, std::uint64_t stream = 0);

double log_likelihood(const ProbabilityModel& model, const OutcomeBatch& outcomes, double theta);

struct MleOptions {
  int grid_points = 201;
  double tolerance = 1e-12;  // final golden-section bracket width (rad)
};

struct MleResult {
  double theta_hat;
  double log_likelihood;
  bool interior;  // false when the coarse-grid maximum sits on the boundary
};

/// Coarse grid over the search interval, then golden-section refinement
/// around the best grid point.
MleResult mle(const ProbabilityModel& model, const OutcomeBatch& outcomes, Interval search,
              const MleOptions& options = {});

struct MonteCarloPlan {
  double theta_true;
  std::uint64_t nu;
  std::uint64_t trials;
  std::uint64_t seed;
  Interval search;
  double fisher;  // per-photon Fisher information used for the CR variance
};

struct Trial {
  std::uint64_t index;
  double theta_true;
  std::uint64_t nu;
  std::uint64_t seed;
  double theta_hat;
  bool interior;
};

struct SaturationReport {
  std::uint64_t trials;
  std::uint64_t used;          // interior estimates
  std::uint64_t non_interior;
  double mean_theta_hat;
  double empirical_variance;   // unbiased sample variance of interior estimates
  double cr_variance;          // 1 / (nu F)
  double ratio;                // empirical / cr

  double non_interior_fraction() const;
  /// empirical >= (1 - 3 sqrt(2 / used)) cr.
  bool respects_cramer_rao() const;
  bool saturated(double lo = 0.85, double hi = 1.25) const;
};

/// One trial: sample with stream = trial index, then estimate.
Trial run_trial(const ProbabilityModel& model, const MonteCarloPlan& plan, std::uint64_t index);

namespace seq {
std::vector<Trial> run_trials(const ProbabilityModel& model, const MonteCarloPlan& plan);
}
namespace par {
std::vector<Trial> run_trials(const ProbabilityModel& model, const MonteCarloPlan& plan,
                              int threads = 0);
}

SaturationReport summarize(const std::vector<Trial>& trials, const MonteCarloPlan& plan);

}  // namespace tiltsense
