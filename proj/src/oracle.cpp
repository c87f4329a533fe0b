#include "tiltsense/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tiltsense/errors.hpp"
#include "tiltsense/quadrature.hpp"

namespace tiltsense {
namespace {

constexpr double kDiscreteFloor = 1e-300;
constexpr double kDensityFloor = 1e-30;
constexpr double kMaxExcludedMass = 1e-6;

// Central differences at h and 2h and their Richardson combination.
struct Derivatives {
  double h;
  double h2;
  double combined() const { return (4.0 * h - h2) / 3.0; }
};

template <class F>
Derivatives differentiate(F&& f, double theta, double step) {
  const double d1 = (f(theta + step) - f(theta - step)) / (2.0 * step);
  const double d2 = (f(theta + 2.0 * step) - f(theta - 2.0 * step)) / (4.0 * step);
  return {d1, d2};
}

struct Contribution {
  double combined = 0.0;
  double coarse = 0.0;  // from the h derivative
  double wide = 0.0;    // from the 2h derivative
  double excluded = 0.0;
};

Contribution continuous_point(const ProbabilityModel& model, double theta, double step,
                              double x) {
  Contribution c;
  for (int label = 0; label < model.label_count(); ++label) {
    const double p = model.density(theta, label, x);
    if (!std::isfinite(p)) {
      c.excluded = std::numeric_limits<double>::infinity();
      continue;
    }
    if (p >= kDensityFloor) {
      const Derivatives d = differentiate(
          [&](double t) { return model.density(t, label, x); }, theta, step);
      if (!std::isfinite(d.h) || !std::isfinite(d.h2)) {
        c.excluded += p;
        continue;
      }
      c.combined += d.combined() * d.combined() / p;
      c.coarse += d.h * d.h / p;
      c.wide += d.h2 * d.h2 / p;
      continue;
    }
    // Tail: continue (dP)^2 / P analytically as P (d log P)^2.
    const double lp = model.log_density(theta, label, x);
    const Derivatives d = differentiate(
        [&](double t) { return model.log_density(t, label, x); }, theta, step);
    if (std::isfinite(lp) && std::isfinite(d.h) && std::isfinite(d.h2)) {
      const double pe = std::exp(lp);
      c.combined += pe * d.combined() * d.combined();
      c.coarse += pe * d.h * d.h;
      c.wide += pe * d.h2 * d.h2;
    } else {
      c.excluded += p;
    }
  }
  return c;
}

}  // namespace

double default_fd_step(double theta) { return std::max(1e-9, 1e-6 * std::abs(theta)); }

OracleResult numeric_fisher_oracle(const ProbabilityModel& model, double theta, double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("finite-difference step must be positive");
  }
  OracleResult out{0.0, 0.0, 0.0, 0.0, true};
  double coarse = 0.0;
  double wide = 0.0;

  if (!model.is_continuous()) {
    for (int label = 0; label < model.label_count(); ++label) {
      const double p = model.probability(theta, label);
      if (!std::isfinite(p)) {
        throw NumericalError("outcome probability is not finite at label " +
                             std::to_string(label));
      }
      if (p < kDiscreteFloor) {
        out.excluded_mass += std::max(p, 0.0);
        continue;
      }
      const Derivatives d = differentiate(
          [&](double t) { return model.probability(t, label); }, theta, step);
      if (!std::isfinite(d.h) || !std::isfinite(d.h2)) {
        out.excluded_mass += p;
        continue;
      }
      out.fisher += d.combined() * d.combined() / p;
      coarse += d.h * d.h / p;
      wide += d.h2 * d.h2 / p;
    }
  } else {
    const Interval domain = model.support(theta);
    QuadratureOptions options;
    options.rel_tol = 1e-10;
    auto part = [&](auto member) {
      return integrate(
          [&](double x) { return continuous_point(model, theta, step, x).*member; },
          domain.lo, domain.hi, options);
    };
    const QuadratureResult main = part(&Contribution::combined);
    const QuadratureResult h1 = part(&Contribution::coarse);
    const QuadratureResult h2 = part(&Contribution::wide);
    const QuadratureResult dropped = part(&Contribution::excluded);
    out.fisher = main.value;
    coarse = h1.value;
    wide = h2.value;
    out.excluded_mass = dropped.value;
    out.quadrature_error = main.error;
    out.converged = main.converged;
  }

  out.richardson_spread = std::abs(coarse - wide) / std::max(std::abs(out.fisher), 1e-300);
  if (!(out.excluded_mass <= kMaxExcludedMass)) {
    throw NumericalError("Fisher oracle dropped probability mass " +
                         std::to_string(out.excluded_mass) + " above the 1e-6 limit");
  }
  return out;
}

}  // namespace tiltsense
