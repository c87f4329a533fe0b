#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "tiltsense/beam.hpp"
#include "tiltsense/polarization.hpp"

namespace tiltsense {

/// Where a sign detector places its split line.
enum class SplitLine {
  displacement,  // x = xi, aligned to the undeflected beam
  origin,        // x = 0
};

struct DirectPosition {
  double z;
};

struct Quadrant {
  double z;
  SplitLine split = SplitLine::displacement;
};

struct SagnacPolarization {
  double z;
  PolarizationState pol;
};

struct SagnacPositionPolarization {
  double z;
  PolarizationState pol;
};

using Scheme = std::variant<DirectPosition, Quadrant, SagnacPolarization,
                            SagnacPositionPolarization>;

std::string_view scheme_name(const Scheme& scheme);
double detector_z(const Scheme& scheme);

// Outcomes, one alternative per scheme. Signs are +1 / -1.
struct PositionOutcome {
  double x;
};
struct SignOutcome {
  int sign;
};
struct PolarizationOutcome {
  int sign;
};
struct PositionPolarizationOutcome {
  double x;
  int sign;
};

using Outcome = std::variant<PositionOutcome, SignOutcome, PolarizationOutcome,
                             PositionPolarizationOutcome>;

/// Small-angle regime indicators. The exact probabilities stay valid when a
/// flag is raised; only the first-order saturation results degrade.
struct RegimeFlags {
  bool gaussian_envelope = false;   // B theta^2 >= 0.01
  bool displacement_phase = false;  // (4 k xi theta)^2 >= 0.01

  bool any() const { return gaussian_envelope || displacement_phase; }
  RegimeFlags& operator|=(const RegimeFlags& other);
  /// Semicolon-separated flag names, empty when no flag is set.
  std::string to_string() const;
};

RegimeFlags regime_flags(const BeamParams& beam, double theta);

struct BinaryProbabilities {
  double plus;
  double minus;
  RegimeFlags flags;
};

struct JointDensity {
  double plus;   // density of (x, +)
  double minus;  // density of (x, -)
  RegimeFlags flags;
};

/// Sign-detector probabilities, 1/2 [1 +- erf(sqrt2 (xi + 2 theta z - split) / w)].
BinaryProbabilities quadrant_probabilities(const BeamParams& beam, double theta, double z,
                                           SplitLine split = SplitLine::displacement);

/// Joint density of detecting the photon at x with diagonal polarization +/-
/// at the output of the Sagnac loop.
JointDensity sagnac_joint_density(const BeamParams& beam, const PolarizationState& pol,
                                  double theta, double z, double x);

/// Position-integrated polarization probabilities; independent of z.
BinaryProbabilities sagnac_polarization_probabilities(const BeamParams& beam,
                                                      const PolarizationState& pol,
                                                      double theta);

/// Polarization probabilities conditioned on detection at x, for |+> input.
BinaryProbabilities conditioned_polarization_probabilities(const BeamParams& beam,
                                                           double theta, double z, double x);

/// Coefficients with Pbar_+(x) = 1/2 (1 + cos(a theta) / cosh(b theta)).
struct AbCoefficients {
  double a;
  double b;
};
AbCoefficients ab_coefficients(const BeamParams& beam, double z, double x);

/// Marginal position density P(x) = p_+(x) + p_-(x) of the Sagnac output.
double detection_density(const BeamParams& beam, const PolarizationState& pol, double theta,
                         double z, double x);

}  // namespace tiltsense
