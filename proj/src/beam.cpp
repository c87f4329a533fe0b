#include "tiltsense/beam.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tiltsense {

BeamParams::BeamParams(double wavenumber, double waist, double displacement)
    : k_(wavenumber), w0_(waist), xi_(displacement) {
  if (!(k_ > 0.0) || !std::isfinite(k_)) {
    throw std::invalid_argument("beam wavenumber must be positive and finite");
  }
  if (!(w0_ > 0.0) || !std::isfinite(w0_)) {
    throw std::invalid_argument("beam waist must be positive and finite");
  }
  if (!std::isfinite(xi_)) {
    throw std::invalid_argument("beam displacement must be finite");
  }
}

BeamParams BeamParams::from_wavelength(double wavelength, double waist,
                                       double displacement) {
  if (!(wavelength > 0.0)) {
    throw std::invalid_argument("wavelength must be positive");
  }
  return {2.0 * std::numbers::pi / wavelength, waist, displacement};
}

BeamParams BeamParams::from_rayleigh_range(double wavenumber, double rayleigh_range,
                                           double displacement) {
  if (!(wavenumber > 0.0) || !(rayleigh_range > 0.0)) {
    throw std::invalid_argument("wavenumber and Rayleigh range must be positive");
  }
  return {wavenumber, std::sqrt(2.0 * rayleigh_range / wavenumber), displacement};
}

double BeamParams::wavelength() const { return 2.0 * std::numbers::pi / k_; }

double width(const BeamParams& beam, double z) {
  if (z < 0.0) {
    throw std::domain_error("detector plane must satisfy z >= 0");
  }
  const double zr = beam.rayleigh_range();
  return beam.w0() * std::hypot(1.0, z / zr);
}

double curvature_radius(const BeamParams& beam, double z) {
  if (z < 0.0) {
    throw std::domain_error("detector plane must satisfy z >= 0");
  }
  if (z == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double zr = beam.rayleigh_range();
  return z * (1.0 + (zr / z) * (zr / z));
}

double gouy_phase(const BeamParams& beam, double z) {
  if (z < 0.0) {
    throw std::domain_error("detector plane must satisfy z >= 0");
  }
  return std::atan(z / beam.rayleigh_range());
}

PlaneGeometry plane_geometry(const BeamParams& beam, double z) {
  return {z, width(beam, z), curvature_radius(beam, z), gouy_phase(beam, z)};
}

double intensity_profile(const BeamParams& beam, double theta, double z, double x) {
  const double w = width(beam, z);
  const double amplitude = std::sqrt(2.0 / (std::numbers::pi * w * w));
  const double u = x - beam.xi() - 2.0 * theta * z;
  return amplitude * std::exp(-2.0 * u * u / (w * w));
}

std::complex<double> field_amplitude(const BeamParams& beam, double z, double x) {
  const PlaneGeometry g = plane_geometry(beam, z);
  const double norm = std::pow(2.0 / (std::numbers::pi * g.width * g.width), 0.25);
  const double u = x - beam.xi();
  const double envelope = norm * std::exp(-u * u / (g.width * g.width));
  // Curvature phase vanishes at the waist (R infinite).
  const double curvature =
      std::isinf(g.curvature_radius) ? 0.0 : beam.k() * x * x / (2.0 * g.curvature_radius);
  return std::polar(envelope, -curvature + g.gouy);
}

}  // namespace tiltsense
