#pragma once

#include <optional>
#include <vector>

#include "tiltsense/beam.hpp"
#include "tiltsense/schemes.hpp"

namespace tiltsense {

struct Interval {
  double lo;
  double hi;

  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// One Gaussian term of a position mixture.
struct MixtureComponent {
  double weight;
  double mean;
  double sd;
};

/// Dominating envelope for rejection sampling:
/// sum over labels of density(x) <= bound * Normal(x; mean, sd).
struct GaussianEnvelope {
  double mean;
  double sd;
  double bound;
};

/// Outcome statistics of a measurement as a function of the tilt angle.
///
/// Discrete models expose probability(theta, label) over label_count()
/// outcomes. Continuous models expose a density in x for each label; the
/// labels of a continuous model partition each detection (e.g. the
/// polarization port), so the densities sum and integrate to one.
class ProbabilityModel {
 public:
  virtual ~ProbabilityModel() = default;

  virtual bool is_continuous() const = 0;
  virtual int label_count() const = 0;

  virtual double probability(double theta, int label) const;
  virtual double density(double theta, int label, double x) const;
  /// Defaults to log(density); overridden where tails would underflow.
  virtual double log_density(double theta, int label, double x) const;
  /// Integration domain holding all but a negligible mass.
  virtual Interval support(double theta) const;

  /// Exact Gaussian-mixture form of the label-summed density, when one exists.
  virtual std::vector<MixtureComponent> position_mixture(double theta) const;
  virtual std::optional<GaussianEnvelope> envelope(double theta) const;

  /// Wraps a sampled (label, x) as the model's Outcome alternative.
  virtual Outcome make_outcome(int label, double x) const;
};

/// A Scheme bound to a beam.
class SchemeModel final : public ProbabilityModel {
 public:
  SchemeModel(BeamParams beam, Scheme scheme);

  const BeamParams& beam() const { return beam_; }
  const Scheme& scheme() const { return scheme_; }

  bool is_continuous() const override;
  int label_count() const override;
  double probability(double theta, int label) const override;
  double density(double theta, int label, double x) const override;
  double log_density(double theta, int label, double x) const override;
  Interval support(double theta) const override;
  std::vector<MixtureComponent> position_mixture(double theta) const override;
  Outcome make_outcome(int label, double x) const override;

 private:
  BeamParams beam_;
  Scheme scheme_;
};

/// Two-outcome polarization measurement by a point detector at x (|+> input).
class ConditionedPolarizationModel final : public ProbabilityModel {
 public:
  ConditionedPolarizationModel(BeamParams beam, double z, double x);

  bool is_continuous() const override { return false; }
  int label_count() const override { return 2; }
  double probability(double theta, int label) const override;
  Outcome make_outcome(int label, double x) const override;

 private:
  BeamParams beam_;
  double z_;
  double x_;
};

/// Label 0 is the "+" outcome, label 1 the "-" outcome.
inline int sign_of_label(int label) { return label == 0 ? +1 : -1; }

}  // namespace tiltsense
