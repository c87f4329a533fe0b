#include "tiltsense/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tiltsense {
namespace {

constexpr double kSupportWidths = 10.0;

void check_label(int label, int count) {
  if (label < 0 || label >= count) {
    throw std::out_of_range("outcome label out of range");
  }
}

}  // namespace

double ProbabilityModel::probability(double, int) const {
  throw std::logic_error("probability() requires a discrete model");
}

double ProbabilityModel::density(double, int, double) const {
  throw std::logic_error("density() requires a continuous model");
}

double ProbabilityModel::log_density(double theta, int label, double x) const {
  return std::log(density(theta, label, x));
}

Interval ProbabilityModel::support(double) const {
  throw std::logic_error("support() requires a continuous model");
}

std::vector<MixtureComponent> ProbabilityModel::position_mixture(double) const { return {}; }

std::optional<GaussianEnvelope> ProbabilityModel::envelope(double) const {
  return std::nullopt;
}

Outcome ProbabilityModel::make_outcome(int label, double x) const {
  if (is_continuous()) {
    return PositionPolarizationOutcome{x, sign_of_label(label)};
  }
  return SignOutcome{sign_of_label(label)};
}

SchemeModel::SchemeModel(BeamParams beam, Scheme scheme)
    : beam_(beam), scheme_(std::move(scheme)) {
  if (detector_z(scheme_) < 0.0) {
    throw std::invalid_argument("detector plane must satisfy z >= 0");
  }
}

bool SchemeModel::is_continuous() const {
  return std::holds_alternative<DirectPosition>(scheme_) ||
         std::holds_alternative<SagnacPositionPolarization>(scheme_);
}

int SchemeModel::label_count() const {
  return std::holds_alternative<DirectPosition>(scheme_) ? 1 : 2;
}

double SchemeModel::probability(double theta, int label) const {
  check_label(label, 2);
  BinaryProbabilities p{};
  if (const auto* q = std::get_if<Quadrant>(&scheme_)) {
    p = quadrant_probabilities(beam_, theta, q->z, q->split);
  } else if (const auto* s = std::get_if<SagnacPolarization>(&scheme_)) {
    p = sagnac_polarization_probabilities(beam_, s->pol, theta);
  } else {
    return ProbabilityModel::probability(theta, label);
  }
  return label == 0 ? p.plus : p.minus;
}

double SchemeModel::density(double theta, int label, double x) const {
  if (const auto* d = std::get_if<DirectPosition>(&scheme_)) {
    check_label(label, 1);
    return intensity_profile(beam_, theta, d->z, x);
  }
  if (const auto* j = std::get_if<SagnacPositionPolarization>(&scheme_)) {
    check_label(label, 2);
    const JointDensity p = sagnac_joint_density(beam_, j->pol, theta, j->z, x);
    return label == 0 ? p.plus : p.minus;
  }
  return ProbabilityModel::density(theta, label, x);
}

double SchemeModel::log_density(double theta, int label, double x) const {
  if (const auto* d = std::get_if<DirectPosition>(&scheme_)) {
    check_label(label, 1);
    const double w = width(beam_, d->z);
    const double u = x - beam_.xi() - 2.0 * theta * d->z;
    return 0.5 * std::log(2.0 / (std::numbers::pi * w * w)) - 2.0 * u * u / (w * w);
  }
  return ProbabilityModel::log_density(theta, label, x);
}

Interval SchemeModel::support(double theta) const {
  if (!is_continuous()) {
    return ProbabilityModel::support(theta);
  }
  const double z = detector_z(scheme_);
  const double reach = 2.0 * std::abs(theta) * z + kSupportWidths * width(beam_, z);
  return {beam_.xi() - reach, beam_.xi() + reach};
}

std::vector<MixtureComponent> SchemeModel::position_mixture(double theta) const {
  if (const auto* d = std::get_if<DirectPosition>(&scheme_)) {
    return {{1.0, beam_.xi() + 2.0 * theta * d->z, 0.5 * width(beam_, d->z)}};
  }
  if (const auto* j = std::get_if<SagnacPositionPolarization>(&scheme_)) {
    // Interference terms cancel in the label sum, leaving the two
    // counter-propagating beams weighted by |alpha|^2 and |beta|^2.
    const double sd = 0.5 * width(beam_, j->z);
    const double shift = 2.0 * theta * j->z;
    return {{std::norm(j->pol.alpha()), beam_.xi() - shift, sd},
            {std::norm(j->pol.beta()), beam_.xi() + shift, sd}};
  }
  return {};
}

Outcome SchemeModel::make_outcome(int label, double x) const {
  return std::visit(
      [&](const auto& s) -> Outcome {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DirectPosition>) {
          return PositionOutcome{x};
        } else if constexpr (std::is_same_v<T, Quadrant>) {
          return SignOutcome{sign_of_label(label)};
        } else if constexpr (std::is_same_v<T, SagnacPolarization>) {
          return PolarizationOutcome{sign_of_label(label)};
        } else {
          return PositionPolarizationOutcome{x, sign_of_label(label)};
        }
      },
      scheme_);
}

ConditionedPolarizationModel::ConditionedPolarizationModel(BeamParams beam, double z, double x)
    : beam_(beam), z_(z), x_(x) {
  if (z_ < 0.0) {
    throw std::invalid_argument("detector plane must satisfy z >= 0");
  }
}

double ConditionedPolarizationModel::probability(double theta, int label) const {
  check_label(label, 2);
  const BinaryProbabilities p = conditioned_polarization_probabilities(beam_, theta, z_, x_);
  return label == 0 ? p.plus : p.minus;
}

Outcome ConditionedPolarizationModel::make_outcome(int label, double) const {
  return PolarizationOutcome{sign_of_label(label)};
}

}  // namespace tiltsense
