#include "tiltsense/polarization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tiltsense {

PolarizationState::PolarizationState(std::complex<double> alpha, std::complex<double> beta)
    : alpha_(alpha), beta_(beta) {
  const double norm = std::norm(alpha_) + std::norm(beta_);
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw std::invalid_argument("polarization amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
  }
}

PolarizationState PolarizationState::from_bloch(double polar, double azimuth) {
  return {std::cos(0.5 * polar), std::polar(std::sin(0.5 * polar), azimuth)};
}

PolarizationState PolarizationState::diagonal() {
  const double h = std::numbers::sqrt2 / 2.0;
  return {h, h};
}

PolarizationState PolarizationState::horizontal() { return {1.0, 0.0}; }
PolarizationState PolarizationState::vertical() { return {0.0, 1.0}; }

double PolarizationState::coherence() const { return std::abs(std::conj(alpha_) * beta_); }

double PolarizationState::relative_phase() const {
  const std::complex<double> c = std::conj(alpha_) * beta_;
  return c == 0.0 ? 0.0 : std::arg(c);
}

double PolarizationState::sigma_z_mean() const { return std::norm(alpha_) - std::norm(beta_); }

}  // namespace tiltsense
