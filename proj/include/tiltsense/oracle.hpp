#pragma once

#include "tiltsense/model.hpp"

namespace tiltsense {

struct OracleResult {
  double fisher;
  double excluded_mass;      // probability mass dropped by the floors
  double richardson_spread;  // |F(h) - F(2h)| / F, a step-size sanity check
  double quadrature_error;   // zero for discrete models
  bool converged;
};

/// max(1e-9 rad, 1e-6 |theta|).
double default_fd_step(double theta);

/// Scheme-agnostic Fisher information from central differences of the
/// model's outcome probabilities, Richardson-combined over steps h and 2h.
///
/// Discrete outcomes with P < 1e-300 are dropped. For continuous models,
/// points with density below 1e-30 use P (d log P / d theta)^2 when the log
/// density is finite and are dropped otherwise. Outcomes whose finite
/// differences are not finite are dropped as well. Throws NumericalError when the
/// dropped mass exceeds 1e-6.
OracleResult numeric_fisher_oracle(const ProbabilityModel& model, double theta, double step);

}  // namespace tiltsense
