#include "tiltsense/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tiltsense/errors.hpp"
#include "tiltsense/parallel.hpp"

namespace tiltsense {
namespace {

constexpr double kMinRejectionEfficiency = 0.01;
constexpr std::uint64_t kRejectionWarmup = 1000;

int draw_label(const ProbabilityModel& model, double theta, double u) {
  double cumulative = 0.0;
  const int last = model.label_count() - 1;
  for (int label = 0; label < last; ++label) {
    cumulative += model.probability(theta, label);
    if (u < cumulative) return label;
  }
  return last;
}

// Label given position, from the per-label densities at x.
int draw_label_at(const ProbabilityModel& model, double theta, double x, double u) {
  const int n = model.label_count();
  if (n == 1) return 0;
  double total = 0.0;
  std::vector<double> dens(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    dens[static_cast<std::size_t>(l)] = model.density(theta, l, x);
    total += dens[static_cast<std::size_t>(l)];
  }
  double cumulative = 0.0;
  for (int l = 0; l < n - 1; ++l) {
    cumulative += dens[static_cast<std::size_t>(l)] / total;
    if (u < cumulative) return l;
  }
  return n - 1;
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

void record(OutcomeBatch& batch, bool continuous, int label, double x) {
  if (continuous) batch.x.push_back(x);
  batch.label.push_back(static_cast<std::int8_t>(label));
  ++batch.label_counts[static_cast<std::size_t>(label)];
}

}  // namespace

Outcome OutcomeBatch::at(const ProbabilityModel& model, std::size_t i) const {
  return model.make_outcome(label.at(i), x.empty() ? 0.0 : x.at(i));
}

OutcomeBatch sample_outcomes(const ProbabilityModel& model, double theta, std::uint64_t nu,
                             CounterRng& rng) {
  OutcomeBatch batch;
  const bool continuous = model.is_continuous();
  batch.label_counts.assign(static_cast<std::size_t>(model.label_count()), 0);
  batch.label.reserve(nu);
  if (continuous) batch.x.reserve(nu);

  if (!continuous) {
    for (std::uint64_t i = 0; i < nu; ++i) {
      record(batch, false, draw_label(model, theta, rng.uniform()), 0.0);
    }
    return batch;
  }

  const std::vector<MixtureComponent> mixture = model.position_mixture(theta);
  if (!mixture.empty()) {
    for (std::uint64_t i = 0; i < nu; ++i) {
      const double pick = rng.uniform();
      std::size_t c = 0;
      double cumulative = mixture[0].weight;
      while (pick >= cumulative && c + 1 < mixture.size()) {
        cumulative += mixture[++c].weight;
      }
      const double x = mixture[c].mean + mixture[c].sd * rng.normal();
      record(batch, true, draw_label_at(model, theta, x, rng.uniform()), x);
    }
    return batch;
  }

  const auto envelope = model.envelope(theta);
  if (!envelope) {
    throw std::logic_error("continuous model exposes neither a mixture nor an envelope");
  }
  if (!(envelope->bound > 0.0) || 1.0 / envelope->bound < kMinRejectionEfficiency) {
    std::ostringstream msg;
    msg << "rejection sampling envelope bound " << envelope->bound
        << " implies efficiency below 1%";
    throw NumericalError(msg.str());
  }
  std::uint64_t proposals = 0;
  for (std::uint64_t i = 0; i < nu; ++i) {
    while (true) {
      ++proposals;
      const double x = envelope->mean + envelope->sd * rng.normal();
      double target = 0.0;
      for (int l = 0; l < model.label_count(); ++l) target += model.density(theta, l, x);
      const double cover = envelope->bound * normal_pdf(x, envelope->mean, envelope->sd);
      if (rng.uniform() * cover <= target) {
        record(batch, true, draw_label_at(model, theta, x, rng.uniform()), x);
        break;
      }
      if (proposals >= kRejectionWarmup &&
          static_cast<double>(i + 1) / static_cast<double>(proposals) <
              kMinRejectionEfficiency) {
        std::ostringstream msg;
        msg << "rejection sampling efficiency " << static_cast<double>(i) / proposals
            << " below 1% after " << proposals << " proposals (" << i << " accepted)";
        throw NumericalError(msg.str());
      }
    }
  }
  return batch;
}

OutcomeBatch sample_outcomes(const ProbabilityModel& model, double theta, std::uint64_t nu,
                             std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  return sample_outcomes(model, theta, nu, rng);
}

double log_likelihood(const ProbabilityModel& model, const OutcomeBatch& outcomes,
                      double theta) {
  double ll = 0.0;
  if (!model.is_continuous()) {
    for (std::size_t l = 0; l < outcomes.label_counts.size(); ++l) {
      const auto n = outcomes.label_counts[l];
      if (n == 0) continue;
      ll += static_cast<double>(n) * std::log(model.probability(theta, static_cast<int>(l)));
    }
    return ll;
  }
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ll += model.log_density(theta, outcomes.label[i], outcomes.x[i]);
  }
  return ll;
}

MleResult mle(const ProbabilityModel& model, const OutcomeBatch& outcomes, Interval search,
              const MleOptions& options) {
  if (!(search.hi > search.lo) || options.grid_points < 3) {
    throw std::invalid_argument("MLE search interval must be nonempty with >= 3 grid points");
  }
  auto objective = [&](double theta) {
    const double ll = log_likelihood(model, outcomes, theta);
    return std::isnan(ll) ? -std::numeric_limits<double>::infinity() : ll;
  };

  const int n = options.grid_points;
  const double spacing = search.width() / (n - 1);
  auto grid = [&](int i) { return i == n - 1 ? search.hi : search.lo + i * spacing; };
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double ll = objective(grid(i));
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  if (best == 0 || best == n - 1) {
    return {grid(best), best_ll, false};
  }

  // Golden-section search on the bracket around the best grid point.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid(best - 1);
  double b = grid(best + 1);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > options.tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  double theta_hat = 0.5 * (a + b);
  double ll = objective(theta_hat);
  // Keep the grid point if refinement lost to roundoff.
  if (best_ll > ll) {
    theta_hat = grid(best);
    ll = best_ll;
  }
  return {theta_hat, ll, true};
}

double SaturationReport::non_interior_fraction() const {
  return trials == 0 ? 0.0 : static_cast<double>(non_interior) / static_cast<double>(trials);
}

bool SaturationReport::respects_cramer_rao() const {
  if (used < 2) return true;
  const double slack = 3.0 * std::sqrt(2.0 / static_cast<double>(used));
  return empirical_variance >= (1.0 - slack) * cr_variance;
}

bool SaturationReport::saturated(double lo, double hi) const {
  return ratio >= lo && ratio <= hi;
}

Trial run_trial(const ProbabilityModel& model, const MonteCarloPlan& plan, std::uint64_t index) {
  CounterRng rng(plan.seed, index);
  const OutcomeBatch outcomes = sample_outcomes(model, plan.theta_true, plan.nu, rng);
  const MleResult fit = mle(model, outcomes, plan.search);
  return {index, plan.theta_true, plan.nu, plan.seed, fit.theta_hat, fit.interior};
}

namespace seq {
std::vector<Trial> run_trials(const ProbabilityModel& model, const MonteCarloPlan& plan) {
  return tiltsense::seq::map_indexed(plan.trials,
                                     [&](std::size_t i) { return run_trial(model, plan, i); });
}
}  // namespace seq

namespace par {
std::vector<Trial> run_trials(const ProbabilityModel& model, const MonteCarloPlan& plan,
                              int threads) {
  return tiltsense::par::map_indexed(
      plan.trials, [&](std::size_t i) { return run_trial(model, plan, i); }, threads);
}
}  // namespace par

SaturationReport summarize(const std::vector<Trial>& trials, const MonteCarloPlan& plan) {
  SaturationReport r{};
  r.trials = trials.size();
  double sum = 0.0;
  for (const Trial& t : trials) {
    if (t.interior) {
      ++r.used;
      sum += t.theta_hat;
    } else {
      ++r.non_interior;
    }
  }
  r.mean_theta_hat = r.used > 0 ? sum / static_cast<double>(r.used)
                                : std::numeric_limits<double>::quiet_NaN();
  double ss = 0.0;
  for (const Trial& t : trials) {
    if (t.interior) ss += (t.theta_hat - r.mean_theta_hat) * (t.theta_hat - r.mean_theta_hat);
  }
  r.empirical_variance = r.used > 1 ? ss / static_cast<double>(r.used - 1)
                                    : std::numeric_limits<double>::quiet_NaN();
  r.cr_variance = 1.0 / (static_cast<double>(plan.nu) * plan.fisher);
  r.ratio = r.empirical_variance / r.cr_variance;
  return r;
}

}  // namespace tiltsense
