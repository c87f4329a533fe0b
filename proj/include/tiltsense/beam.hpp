#pragma once

#include <complex>

namespace tiltsense {

/// Gaussian beam reflected off the tilting object at z = 0.
///
/// Only the x transverse dimension is modeled. All quantities are SI
/// (meters, radians, rad/m).
class BeamParams {
 public:
  /// Throws std::invalid_argument unless k > 0 and w0 > 0.
  BeamParams(double wavenumber, double waist, double displacement = 0.0);

  static BeamParams from_wavelength(double wavelength, double waist,
                                    double displacement = 0.0);
  /// Back-solves the waist from z_R = k w0^2 / 2.
  static BeamParams from_rayleigh_range(double wavenumber, double rayleigh_range,
                                        double displacement = 0.0);

  double k() const { return k_; }
  double w0() const { return w0_; }
  double xi() const { return xi_; }
  double wavelength() const;
  double rayleigh_range() const { return 0.5 * k_ * w0_ * w0_; }
  /// Transverse variance of the intensity at the object plane, w0^2 / 4.
  double waist_variance() const { return 0.25 * w0_ * w0_; }

  BeamParams with_displacement(double xi) const { return {k_, w0_, xi}; }

 private:
  double k_;
  double w0_;
  double xi_;
};

/// Beam geometry at a detector plane.
struct PlaneGeometry {
  double z;
  double width;             // w(z)
  double curvature_radius;  // R(z); +inf at z = 0
  double gouy;              // eta(z) in [0, pi/2)
};

PlaneGeometry plane_geometry(const BeamParams& beam, double z);

/// w(z) = w0 sqrt(1 + z^2/z_R^2). Throws std::domain_error for z < 0.
double width(const BeamParams& beam, double z);
/// R(z) = z (1 + z_R^2/z^2), +infinity at the waist.
double curvature_radius(const BeamParams& beam, double z);
double gouy_phase(const BeamParams& beam, double z);

/// Photon detection density at x after a tilt theta: a normalized Gaussian
/// centered at xi + 2 theta z with variance w(z)^2 / 4.
double intensity_profile(const BeamParams& beam, double theta, double z, double x);

/// Complex field E(x, z) of the untilted beam centered at xi, including the
/// curvature and Gouy phases. |E|^2 equals intensity_profile at theta = 0.
std::complex<double> field_amplitude(const BeamParams& beam, double z, double x);

}  // namespace tiltsense
