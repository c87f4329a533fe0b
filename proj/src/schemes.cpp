#include "tiltsense/schemes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tiltsense {
namespace {

constexpr double kSmallAngleLimit = 0.01;
// cosh(700) is close to the double overflow threshold.
constexpr double kCoshCutoff = 700.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double square(double v) { return v * v; }

}  // namespace

std::string_view scheme_name(const Scheme& scheme) {
  return std::visit(overloaded{
                        [](const DirectPosition&) { return std::string_view{"position"}; },
                        [](const Quadrant&) { return std::string_view{"quadrant"}; },
                        [](const SagnacPolarization&) {
                          return std::string_view{"sagnac_polarization"};
                        },
                        [](const SagnacPositionPolarization&) {
                          return std::string_view{"sagnac_position_polarization"};
                        },
                    },
                    scheme);
}

double detector_z(const Scheme& scheme) {
  return std::visit([](const auto& s) { return s.z; }, scheme);
}

RegimeFlags& RegimeFlags::operator|=(const RegimeFlags& other) {
  gaussian_envelope = gaussian_envelope || other.gaussian_envelope;
  displacement_phase = displacement_phase || other.displacement_phase;
  return *this;
}

std::string RegimeFlags::to_string() const {
  std::string out;
  if (gaussian_envelope) out += "gaussian_envelope";
  if (displacement_phase) {
    if (!out.empty()) out += ';';
    out += "displacement_phase";
  }
  return out;
}

RegimeFlags regime_flags(const BeamParams& beam, double theta) {
  const double b_coeff = 2.0 * square(beam.k() * beam.w0());
  RegimeFlags flags;
  flags.gaussian_envelope = b_coeff * theta * theta >= kSmallAngleLimit;
  flags.displacement_phase = square(4.0 * beam.k() * beam.xi() * theta) >= kSmallAngleLimit;
  return flags;
}

BinaryProbabilities quadrant_probabilities(const BeamParams& beam, double theta, double z,
                                           SplitLine split) {
  const double w = width(beam, z);
  const double split_x = split == SplitLine::displacement ? beam.xi() : 0.0;
  const double t = std::numbers::sqrt2 * (beam.xi() + 2.0 * theta * z - split_x) / w;
  return {0.5 * std::erfc(-t), 0.5 * std::erfc(t), regime_flags(beam, theta)};
}

JointDensity sagnac_joint_density(const BeamParams& beam, const PolarizationState& pol,
                                  double theta, double z, double x) {
  const double w = width(beam, z);
  const double w2 = w * w;
  const double amplitude = std::sqrt(2.0 / (std::numbers::pi * w2));
  const double u = x - beam.xi();
  const double s = 2.0 * theta * z;
  const double ra = std::abs(pol.alpha());
  const double rb = std::abs(pol.beta());

  // |alpha psi_+| and |beta psi_-|; H is displaced to xi - 2 theta z.
  const double r1 = ra * std::sqrt(amplitude) * std::exp(-square(u + s) / w2);
  const double r2 = rb * std::sqrt(amplitude) * std::exp(-square(u - s) / w2);
  const double y = 2.0 * u * s / w2;
  double diff;
  if (std::abs(y) < 0.5) {
    const double common = std::sqrt(amplitude) * std::exp(-(u * u + s * s) / w2);
    diff = common * ((ra - rb) * std::cosh(y) - (ra + rb) * std::sinh(y));
  } else {
    diff = r1 - r2;
  }

  const double k = beam.k();
  const double phase = 4.0 * k * theta * (beam.w0() * beam.w0() / w2) * u +
                       4.0 * k * theta * beam.xi() - pol.relative_phase();
  const double c = std::cos(0.5 * phase);
  const double sn = std::sin(0.5 * phase);
  // (r1 -+ r2)^2 rewritten so the destructive port is free of cancellation.
  const double plus = 0.5 * (diff * diff + 4.0 * r1 * r2 * c * c);
  const double minus = 0.5 * (diff * diff + 4.0 * r1 * r2 * sn * sn);
  return {plus, minus, regime_flags(beam, theta)};
}

BinaryProbabilities sagnac_polarization_probabilities(const BeamParams& beam,
                                                      const PolarizationState& pol,
                                                      double theta) {
  const double b_theta2 = 2.0 * square(beam.k() * beam.w0()) * theta * theta;
  const double envelope = std::exp(-b_theta2);
  const double envelope_loss = -std::expm1(-b_theta2);
  const double d = pol.coherence();
  const double phase = 4.0 * beam.k() * theta * beam.xi() - pol.relative_phase();
  const double c = std::cos(0.5 * phase);
  const double s = std::sin(0.5 * phase);
  // 1 - 2d written as (|alpha| - |beta|)^2 so it stays non-negative.
  const double incoherent = square(std::abs(pol.alpha()) - std::abs(pol.beta()));
  const double plus = 0.5 * (incoherent + 2.0 * d * (envelope_loss + 2.0 * envelope * c * c));
  const double minus = 0.5 * (incoherent + 2.0 * d * (envelope_loss + 2.0 * envelope * s * s));
  return {plus, minus, regime_flags(beam, theta)};
}

BinaryProbabilities conditioned_polarization_probabilities(const BeamParams& beam,
                                                           double theta, double z, double x) {
  const double w = width(beam, z);
  const double w2 = w * w;
  const double u = x - beam.xi();
  const double k = beam.k();
  const double cos_arg = 4.0 * k * theta * (beam.w0() * beam.w0() / w2) * u +
                         4.0 * k * theta * beam.xi();
  const double cosh_arg = 8.0 * theta * z * u / w2;
  const RegimeFlags flags = regime_flags(beam, theta);
  if (std::abs(cosh_arg) > kCoshCutoff) {
    return {0.5, 0.5, flags};
  }
  // 1/2 (1 -+ cos/cosh) in half-angle form.
  const double ch = std::cosh(cosh_arg);
  const double sh_half = std::sinh(0.5 * cosh_arg);
  const double ch_half = std::cosh(0.5 * cosh_arg);
  const double s_half = std::sin(0.5 * cos_arg);
  const double minus = (sh_half * sh_half + s_half * s_half) / ch;
  const double plus = (ch_half * ch_half - s_half * s_half) / ch;
  return {plus, minus, flags};
}

AbCoefficients ab_coefficients(const BeamParams& beam, double z, double x) {
  if (z < 0.0) {
    throw std::domain_error("detector plane must satisfy z >= 0");
  }
  const double zr = beam.rayleigh_range();
  const double denom = z * z + zr * zr;
  const double k = beam.k();
  return {4.0 * k * (zr * zr * x + z * z * beam.xi()) / denom,
          4.0 * k * z * zr * (x - beam.xi()) / denom};
}

double detection_density(const BeamParams& beam, const PolarizationState& pol, double theta,
                         double z, double x) {
  const double w = width(beam, z);
  const double w2 = w * w;
  const double amplitude = std::sqrt(2.0 / (std::numbers::pi * w2));
  const double u = x - beam.xi();
  const double s = 2.0 * theta * z;
  return amplitude * (std::norm(pol.alpha()) * std::exp(-2.0 * square(u + s) / w2) +
                      std::norm(pol.beta()) * std::exp(-2.0 * square(u - s) / w2));
}

}  // namespace tiltsense
