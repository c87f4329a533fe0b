#pragma once

#include <string>

#include "tiltsense/beam.hpp"
#include "tiltsense/polarization.hpp"
#include "tiltsense/schemes.hpp"

namespace tiltsense {

// Quantum Fisher information bounds (per photon, 1/rad^2).

/// 16 k^2 w0^2/4: single-beam deflection.
double qfi_beam_deflection(const BeamParams& beam);
/// 16 k^2 [w0^2/4 + (1 - <sz>^2) xi^2] for a product polarization state.
double qfi_sagnac(const BeamParams& beam, const PolarizationState& pol);
/// 8 k^2 (1 - <sz>) [w0^2/4 + (1 + <sz>) xi^2 / 2]; only V probes the object.
double qfi_mach_zehnder(const BeamParams& beam, const PolarizationState& pol);

// Classical Fisher information of concrete measurements.

double fisher_position(const BeamParams& beam, double z);
double fisher_quadrant(const BeamParams& beam, double theta, double z,
                       SplitLine split = SplitLine::displacement);
/// Polarization-only measurement at the Sagnac output. At the degenerate
/// point (d = 1/2, sin(phi) = 0, theta = 0) the theta -> 0 limit is returned.
double fisher_sagnac_polarization(const BeamParams& beam, const PolarizationState& pol,
                                  double theta);
/// Fisher information of a polarization measurement conditioned on
/// detection at x (|+> input). Tends to a(x)^2 + b(x)^2 as theta -> 0.
double fisher_conditioned(const BeamParams& beam, double z, double x, double theta);

/// Joint position-polarization information split as
/// total = int P(x) Fbar(x) dx + int (dP/dtheta)^2 / P dx  (|+> input).
struct FisherDecomposition {
  double avg_conditioned;
  double position_part;
  double total;
  double error_estimate;  // summed quadrature error of both integrals
  bool converged;
};
FisherDecomposition fisher_total_decomposition(const BeamParams& beam, double z, double theta);

/// delta theta >= 1 / sqrt(nu F).
double cramer_rao_bound(double fisher, double repetitions);

/// Closed form, numeric oracle and QFI for one configuration.
struct FisherReport {
  double analytic;
  double numeric;
  double qfi;
  double ratio;     // analytic / qfi
  double cr_bound;  // 1 / sqrt(nu analytic)
  double oracle_rel_error;
  double oracle_excluded_mass;
  RegimeFlags flags;
  std::string notes;  // extra diagnostics, semicolon separated
};

FisherReport fisher_report(const BeamParams& beam, const Scheme& scheme, double theta,
                           double repetitions = 1.0);

/// QFI that bounds a scheme's measurements.
double scheme_qfi(const BeamParams& beam, const Scheme& scheme);
/// Closed-form Fisher information of a scheme; NaN when none applies.
double scheme_fisher(const BeamParams& beam, const Scheme& scheme, double theta);

}  // namespace tiltsense
