#include "tiltsense/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tiltsense/errors.hpp"
#include "tiltsense/model.hpp"
#include "tiltsense/oracle.hpp"
#include "tiltsense/quadrature.hpp"

namespace tiltsense {
namespace {

constexpr double kCoshCutoff = 700.0;
constexpr double kSeriesTheta = 1e-12;
// 1 - 4 d^2 cos^2(phi) below this is treated as the |+>-like degenerate point.
constexpr double kDegenerateContrast = 1e-12;

double square(double v) { return v * v; }

bool is_diagonal(const PolarizationState& pol) {
  return std::abs(pol.coherence() - 0.5) < 1e-12 && std::abs(pol.relative_phase()) < 1e-12;
}

// log(erfc(t)) for large positive t from the asymptotic series.
double log_erfc_large(double t) {
  const double t2 = t * t;
  return -t2 - std::log(t * std::sqrt(std::numbers::pi)) +
         std::log1p(-1.0 / (2.0 * t2) + 3.0 / (4.0 * t2 * t2));
}

}  // namespace

double qfi_beam_deflection(const BeamParams& beam) {
  return 16.0 * square(beam.k()) * beam.waist_variance();
}

double qfi_sagnac(const BeamParams& beam, const PolarizationState& pol) {
  const double sz = pol.sigma_z_mean();
  return 16.0 * square(beam.k()) *
         (beam.waist_variance() + (1.0 - sz * sz) * square(beam.xi()));
}

double qfi_mach_zehnder(const BeamParams& beam, const PolarizationState& pol) {
  const double sz = pol.sigma_z_mean();
  return 8.0 * square(beam.k()) * (1.0 - sz) *
         (beam.waist_variance() + 0.5 * (1.0 + sz) * square(beam.xi()));
}

double fisher_position(const BeamParams& beam, double z) {
  if (z < 0.0) {
    throw std::domain_error("detector plane must satisfy z >= 0");
  }
  const double zr = beam.rayleigh_range();
  return qfi_beam_deflection(beam) * z * z / (z * z + zr * zr);
}

double fisher_quadrant(const BeamParams& beam, double theta, double z, SplitLine split) {
  const double w = width(beam, z);
  const double split_x = split == SplitLine::displacement ? beam.xi() : 0.0;
  const double t = std::numbers::sqrt2 * (beam.xi() + 2.0 * theta * z - split_x) / w;
  const double scale = 32.0 * z * z / (std::numbers::pi * w * w);
  const double at = std::abs(t);
  if (at > 26.0) {
    // erfc(|t|) underflows together with exp(-2 t^2); 1 + erf(|t|) -> 2.
    return scale * std::exp(-2.0 * t * t - log_erfc_large(at) - std::log(std::erfc(-at)));
  }
  // 1 - erf^2 = erfc(t) erfc(-t)
  return scale * std::exp(-2.0 * t * t) / (std::erfc(t) * std::erfc(-t));
}

double fisher_sagnac_polarization(const BeamParams& beam, const PolarizationState& pol,
                                  double theta) {
  const double k = beam.k();
  const double xi = beam.xi();
  const double b_coeff = 2.0 * square(k * beam.w0());
  const double d = pol.coherence();
  const double phi = pol.relative_phase();
  // 1 - 4 d^2 equals <sz>^2 for a pure state; the latter has no cancellation.
  const double visibility_loss = square(pol.sigma_z_mean());
  const double contrast_gap = visibility_loss + 4.0 * d * d * square(std::sin(phi));

  if (std::abs(theta) < kSeriesTheta) {
    // First-order expansion of numerator and denominator around theta = 0.
    const bool degenerate = contrast_gap <= kDegenerateContrast;
    const double g0 = degenerate ? 0.0 : -2.0 * k * xi * std::sin(phi);
    const double g1 = std::cos(phi) * (b_coeff + 8.0 * k * k * xi * xi);
    const double s0 = degenerate ? 0.0 : -std::sin(phi);
    const double s1 = 4.0 * k * xi * std::cos(phi);
    const double gap0 = degenerate ? 0.0 : contrast_gap;
    const double den = 2.0 * b_coeff * theta * theta + gap0 + 4.0 * d * d * square(s0 + s1 * theta);
    if (den == 0.0) {
      return 16.0 * d * d * g1 * g1 / (2.0 * b_coeff + 4.0 * d * d * s1 * s1);
    }
    return 16.0 * d * d * square(g0 + g1 * theta) / den;
  }

  const double phase = 4.0 * k * xi * theta - phi;
  const double g = b_coeff * theta * std::cos(phase) + 2.0 * k * xi * std::sin(phase);
  // e^{2 B theta^2} - 4 d^2 cos^2 written without cancellation.
  const double den = std::expm1(2.0 * b_coeff * theta * theta) + visibility_loss +
                     4.0 * d * d * square(std::sin(phase));
  return 16.0 * d * d * g * g / den;
}

double fisher_conditioned(const BeamParams& beam, double z, double x, double theta) {
  const double w = width(beam, z);
  const double w2 = w * w;
  const double u = x - beam.xi();
  const double k = beam.k();
  const double a = 4.0 * k * (beam.w0() * beam.w0() / w2) * u + 4.0 * k * beam.xi();
  const double b = 8.0 * z * u / w2;
  const double limit = a * a + b * b;
  const double at = a * theta;
  const double bt = b * theta;
  if (std::abs(bt) > kCoshCutoff) {
    return 0.0;
  }
  if (std::max(std::abs(at), std::abs(bt)) < 1e-8) {
    return limit;
  }
  // Fbar = C'^2 / ((1 - C)(1 + C)) with C = cos(a theta) / cosh(b theta);
  // the cosh factors cancel between numerator and denominator.
  const double num = a * std::sin(at) + b * std::cos(at) * std::tanh(bt);
  const double sh = std::sinh(0.5 * bt);
  const double ch = std::cosh(0.5 * bt);
  const double sn = std::sin(0.5 * at);
  const double den = 4.0 * (sh * sh + sn * sn) * (ch * ch - sn * sn);
  if (den == 0.0) {
    return limit;
  }
  return num * num / den;
}

FisherDecomposition fisher_total_decomposition(const BeamParams& beam, double z, double theta) {
  const PolarizationState plus = PolarizationState::diagonal();
  const double w = width(beam, z);
  const double w2 = w * w;
  const double reach = 2.0 * std::abs(theta) * z + 10.0 * w;
  const double lo = beam.xi() - reach;
  const double hi = beam.xi() + reach;

  auto conditioned = [&](double x) {
    return detection_density(beam, plus, theta, z, x) * fisher_conditioned(beam, z, x, theta);
  };
  // P(x) = A exp(-2(u^2 + s^2)/w^2) cosh(8 theta z u / w^2) for |+> input.
  auto position = [&](double x) {
    const double u = x - beam.xi();
    const double arg = 8.0 * theta * z * u / w2;
    const double score = -16.0 * theta * z * z / w2 + (8.0 * z * u / w2) * std::tanh(arg);
    return detection_density(beam, plus, theta, z, x) * score * score;
  };

  QuadratureOptions options;
  options.rel_tol = 1e-12;
  const QuadratureResult avg = integrate(conditioned, lo, hi, options);
  const QuadratureResult pos = integrate(position, lo, hi, options);
  return {avg.value, pos.value, avg.value + pos.value, avg.error + pos.error,
          avg.converged && pos.converged};
}

double cramer_rao_bound(double fisher, double repetitions) {
  if (!(fisher > 0.0) || !(repetitions > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return 1.0 / std::sqrt(repetitions * fisher);
}

double scheme_qfi(const BeamParams& beam, const Scheme& scheme) {
  if (const auto* s = std::get_if<SagnacPolarization>(&scheme)) {
    return qfi_sagnac(beam, s->pol);
  }
  if (const auto* j = std::get_if<SagnacPositionPolarization>(&scheme)) {
    return qfi_sagnac(beam, j->pol);
  }
  return qfi_beam_deflection(beam);
}

double scheme_fisher(const BeamParams& beam, const Scheme& scheme, double theta) {
  if (const auto* d = std::get_if<DirectPosition>(&scheme)) {
    return fisher_position(beam, d->z);
  }
  if (const auto* q = std::get_if<Quadrant>(&scheme)) {
    return fisher_quadrant(beam, theta, q->z, q->split);
  }
  if (const auto* s = std::get_if<SagnacPolarization>(&scheme)) {
    return fisher_sagnac_polarization(beam, s->pol, theta);
  }
  const auto& j = std::get<SagnacPositionPolarization>(scheme);
  if (!is_diagonal(j.pol)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const FisherDecomposition dec = fisher_total_decomposition(beam, j.z, theta);
  if (!dec.converged) {
    throw NumericalError("joint Fisher quadrature did not converge (error estimate " +
                         std::to_string(dec.error_estimate) + ")");
  }
  return dec.total;
}

FisherReport fisher_report(const BeamParams& beam, const Scheme& scheme, double theta,
                           double repetitions) {
  FisherReport report{};
  report.flags = regime_flags(beam, theta);
  report.analytic = scheme_fisher(beam, scheme, theta);
  report.qfi = scheme_qfi(beam, scheme);
  report.ratio = report.qfi > 0.0 ? report.analytic / report.qfi
                                  : std::numeric_limits<double>::quiet_NaN();
  report.cr_bound = cramer_rao_bound(report.analytic, repetitions);

  const SchemeModel model(beam, scheme);
  const OracleResult oracle = numeric_fisher_oracle(model, theta, default_fd_step(theta));
  report.numeric = oracle.fisher;
  report.oracle_excluded_mass = oracle.excluded_mass;
  const double scale = std::max(std::abs(report.analytic), 1e-300);
  report.oracle_rel_error = std::abs(report.analytic - report.numeric) / scale;

  std::string notes;
  auto add = [&](const char* note) {
    if (!notes.empty()) notes += ';';
    notes += note;
  };
  if (std::isnan(report.analytic)) add("no_closed_form");
  if (!oracle.converged) add("oracle_quadrature_unconverged");
  // A vanishing outcome probability makes the per-point information 0/0;
  // the closed form then carries the limit, which finite differences miss.
  bool zero_probability = false;
  if (!model.is_continuous()) {
    for (int label = 0; label < model.label_count(); ++label) {
      zero_probability = zero_probability || model.probability(theta, label) <= 0.0;
    }
  }
  const double negligible = 1e-12 * report.qfi;
  const bool both_negligible =
      std::abs(report.analytic) <= negligible && std::abs(report.numeric) <= negligible;
  if (zero_probability && report.analytic > 0.0) {
    add("zero_probability_limit");
  } else if (report.analytic != 0.0 && !both_negligible && report.oracle_rel_error > 1e-4) {
    add("oracle_mismatch");
  }
  report.notes = notes;
  return report;
}

}  // namespace tiltsense
