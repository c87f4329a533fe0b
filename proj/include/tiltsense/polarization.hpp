#pragma once

#include <complex>

namespace tiltsense {

/// Polarization qubit alpha|H> + beta|V> used as the interferometer's
/// path marker.
class PolarizationState {
 public:
  /// Throws std::invalid_argument unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
  PolarizationState(std::complex<double> alpha, std::complex<double> beta);

  /// alpha = cos(polar/2), beta = exp(i azimuth) sin(polar/2).
  static PolarizationState from_bloch(double polar, double azimuth);
  static PolarizationState diagonal();  // |+> = (|H> + |V>)/sqrt(2)
  static PolarizationState horizontal();
  static PolarizationState vertical();

  std::complex<double> alpha() const { return alpha_; }
  std::complex<double> beta() const { return beta_; }

  /// d with d exp(i phi) = conj(alpha) beta.
  double coherence() const;
  double relative_phase() const;
  double sigma_z_mean() const;

 private:
  std::complex<double> alpha_;
  std::complex<double> beta_;
};

}  // namespace tiltsense
