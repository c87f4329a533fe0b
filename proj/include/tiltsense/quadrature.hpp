#pragma once

#include <functional>

namespace tiltsense {

struct QuadratureResult {
  double value;
  double error;     // accumulated Kronrod error estimate
  double l1;        // integral of |f|
  bool converged;
  int intervals;
};

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_floor = 0.0;
  int panels = 8;  // uniform pre-split before adaptive refinement
  int max_intervals = 4000;
};

/// Globally adaptive 61-point Gauss-Kronrod over [a, b]. The panel with the
/// largest error is bisected until the summed error drops below
/// max(rel_tol * |I|, 4 eps * L1, abs_floor).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

}  // namespace tiltsense
