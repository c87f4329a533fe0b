// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tiltsense/cli/commands.hpp"
#include "tiltsense/fisher.hpp"
#include "tiltsense/oracle.hpp"
#include "tiltsense/schemes.hpp"

using namespace tiltsense;
using tiltsense::testing::quad;

namespace {

const double kLambda = 633e-9;
const double kW0 = 1e-3;
const BeamParams kBeam = BeamParams::from_wavelength(kLambda, kW0);
const double kK = kBeam.k();
const double kZr = kBeam.rayleigh_range();

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Collects the worst deviation seen against a tolerance.
struct Worst {
  double value = 0.0;
  bool ok = true;

  void check(double deviation, double tolerance) {
    if (!(deviation <= tolerance)) ok = false;
    if (!(deviation <= value)) value = std::isnan(deviation) ? INFINITY : deviation;
  }
};

struct Verdict {
  bool pass;
  std::string detail;
};

// Small-angle information of the polarization measurement, per photon.
double polarization_optimum(double w0, double xi) {
  return 16.0 * kK * kK * (w0 * w0 / 4.0 + xi * xi);
}

// Conditioned information a(x)^2 + b(x)^2 at theta -> 0, in units of k^2.
double fbar_over_k2(double zr, double xi, double z, double x) {
  return 16.0 * (zr * zr * x * x + z * z * xi * xi) / (z * z + zr * zr);
}

Verdict criterion1() {
  const double target = 2.0 / std::numbers::pi;
  const double qfi = qfi_beam_deflection(kBeam);
  double previous = 0.0;
  bool monotone = true;
  for (double n : {0.5, 1.0, 3.0, 10.0, 30.0, 100.0}) {
    const double r = fisher_quadrant(kBeam, 0.0, n * kZr) / qfi;
    monotone = monotone && r > previous && r < target;
    previous = r;
  }
  const double gap = std::abs(previous - target);
  return {gap < 1e-4 && monotone,
          "|F/H - 2/pi| at 100 z_R = " + sci(gap) + " (tol 1e-4), increasing toward 2/pi: " +
              (monotone ? "yes" : "no")};
}

Verdict criterion2() {
  const double qfi = qfi_beam_deflection(kBeam);
  Worst dev;
  for (double n : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) {
    const double z = n * kZr;
    dev.check(std::abs(fisher_position(kBeam, z) / qfi - z * z / (z * z + kZr * kZr)), 1e-12);
  }
  const double far = fisher_position(kBeam, 100.0 * kZr) / qfi;
  return {dev.ok && far > 0.9999, "max |F/H - z^2/(z^2+z_R^2)| = " + sci(dev.value) +
                                      " (tol 1e-12), ratio at 100 z_R = " + sci(far)};
}

Verdict criterion3() {
  Worst dev;
  const auto plus = PolarizationState::diagonal();
  for (double xi : {0.0, 0.5e-3, 1e-3, 2e-3}) {
    const BeamParams beam = kBeam.with_displacement(xi);
    dev.check(rel(fisher_sagnac_polarization(beam, plus, 0.0), polarization_optimum(kW0, xi)),
              1e-8);
  }
  return {dev.ok, "max relative deviation from 16k^2(w0^2/4 + xi^2) = " + sci(dev.value) +
                      " (tol 1e-8)"};
}

Verdict criterion4() {
  Worst norm, marg;
  const auto pol = PolarizationState::from_bloch(1.2, 0.4);
  for (double theta : {-8e-6, -1e-6, 0.0, 3e-6, 2e-5}) {
    for (double xi : {0.0, 0.25e-3, 0.5e-3, 1e-3, 2e-3}) {
      const BeamParams beam = kBeam.with_displacement(xi);
      const auto closed = sagnac_polarization_probabilities(beam, pol, theta);
      for (double n : {0.0, 0.3, 1.0, 4.0, 10.0}) {
        const double z = n * kZr;
        const double reach = 2.0 * std::abs(theta) * z + 10.0 * width(beam, z);
        const double lo = xi - reach;
        const double hi = xi + reach;
        const double mp =
            quad([&](double x) { return sagnac_joint_density(beam, pol, theta, z, x).plus; }, lo,
                 hi);
        const double mm =
            quad([&](double x) { return sagnac_joint_density(beam, pol, theta, z, x).minus; }, lo,
                 hi);
        norm.check(std::abs(mp + mm - 1.0), 1e-9);
        marg.check(std::max(std::abs(mp - closed.plus), std::abs(mm - closed.minus)), 1e-9);
      }
    }
  }
  return {norm.ok && marg.ok, "125 points: max |int p - 1| = " + sci(norm.value) +
                                  ", max marginal deviation = " + sci(marg.value) + " (tol 1e-9)"};
}

Verdict criterion5() {
  Worst dev, pos;
  bool converged = true;
  for (double xi : {0.0, 1e-3}) {
    const BeamParams beam = kBeam.with_displacement(xi);
    for (double n : {0.0, 1.0, 5.0}) {
      const auto d = fisher_total_decomposition(beam, n * kZr, 1e-9);
      converged = converged && d.converged;
      dev.check(rel(d.avg_conditioned, polarization_optimum(kW0, xi)), 1e-5);
      pos.check(d.position_part / d.total, 1e-6);
    }
  }
  return {dev.ok && pos.ok && converged,
          "max relative deviation of int P Fbar = " + sci(dev.value) +
              " (tol 1e-5), max position_part/total = " + sci(pos.value) + " (tol 1e-6)"};
}

Verdict criterion6() {
  const double xi = 1e-3;
  const BeamParams beam = kBeam.with_displacement(xi);
  double lo = INFINITY, hi = 0.0, previous = -1.0;
  bool monotone = true;
  for (int i = 0; i <= 400; ++i) {
    const double z = 10.0 * kZr * i / 400.0;
    const double critical = fisher_conditioned(beam, z, xi, 0.0);
    lo = std::min(lo, critical);
    hi = std::max(hi, critical);
    const double center = fisher_conditioned(beam, z, 0.0, 0.0);
    monotone = monotone && center > previous;
    previous = center;
  }
  const double flat = (hi - lo) / hi;
  const double limit = 16.0 * kK * kK * xi * xi;
  const double far = rel(fisher_conditioned(beam, 100.0 * kZr, 0.0, 0.0), limit);
  return {flat < 1e-9 && monotone && far < 1e-4,
          "x = xi spread over [0, 10 z_R] = " + sci(flat) + " (tol 1e-9); x = 0 increasing: " +
              (monotone ? "yes" : "no") + ", relative gap to 16k^2 xi^2 at 100 z_R = " + sci(far) +
              " (tol 1e-4)"};
}

Verdict criterion7() {
  Worst dev;
  int cases = 0;
  auto compare = [&](double closed, const ProbabilityModel& model, double theta) {
    const OracleResult r = numeric_fisher_oracle(model, theta, default_fd_step(theta));
    dev.check(rel(r.fisher, closed), 1e-4);
    ++cases;
  };
  const std::vector<PolarizationState> states{
      PolarizationState::diagonal(), PolarizationState::from_bloch(1.0, 0.0),
      PolarizationState::from_bloch(2.0, 0.9), PolarizationState::from_bloch(1.4, -2.2)};
  for (double xi : {0.0, 1e-3}) {
    const BeamParams beam = kBeam.with_displacement(xi);
    for (double n : {0.5, 1.0, 5.0}) {
      const double z = n * kZr;
      for (double theta : {1e-7, 1e-6, 5e-6}) {
        compare(fisher_position(beam, z), SchemeModel(beam, DirectPosition{z}), theta);
        compare(fisher_quadrant(beam, theta, z), SchemeModel(beam, Quadrant{z}), theta);
        for (double x : {-1e-3, 0.3e-3, 1.5e-3}) {
          compare(fisher_conditioned(beam, z, x, theta),
                  ConditionedPolarizationModel(beam, z, x), theta);
        }
      }
    }
    for (const auto& pol : states) {
      for (double theta : {1e-7, 1e-6, 5e-6}) {
        compare(fisher_sagnac_polarization(beam, pol, theta),
                SchemeModel(beam, SagnacPolarization{0.0, pol}), theta);
      }
    }
  }

  // The contrast term enters squared in d; a linear-in-d contrast misses the
  // oracle by orders of magnitude more than the tolerance.
  const BeamParams beam = kBeam.with_displacement(1e-3);
  const auto pol = PolarizationState::from_bloch(1.0, 0.0);
  const double theta = 1e-6;
  const double d = pol.coherence();
  const double b = 2.0 * std::pow(kK * kW0, 2);
  const double phase = 4.0 * kK * 1e-3 * theta;
  const double g = b * theta * std::cos(phase) + 2.0 * kK * 1e-3 * std::sin(phase);
  const double linear =
      16.0 * d * d * g * g /
      (std::exp(2.0 * b * theta * theta) - 4.0 * d * std::pow(std::cos(phase), 2));
  const double oracle =
      numeric_fisher_oracle(SchemeModel(beam, SagnacPolarization{0.0, pol}), theta,
                            default_fd_step(theta))
          .fisher;
  const double linear_gap = rel(linear, oracle);
  return {dev.ok && linear_gap > 1e-2,
          std::to_string(cases) + " configurations, max relative deviation = " + sci(dev.value) +
              " (tol 1e-4); linear-in-d contrast deviates by " + sci(linear_gap)};
}

Verdict criterion8() {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> waist(0.1e-3, 3e-3), disp(0.0, 3e-3), sz(-1.0, 1.0),
      azimuth(-std::numbers::pi, std::numbers::pi);
  int violations = 0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) {
    const BeamParams beam(kK, waist(gen), disp(gen));
    const auto pol = PolarizationState::from_bloch(std::acos(sz(gen)), azimuth(gen));
    if (qfi_sagnac(beam, pol) < qfi_mach_zehnder(beam, pol) * (1.0 - 1e-12)) ++violations;
  }
  // Crossover at <sz> = 0: MZ beats single-beam deflection iff xi^2 > w0^2 / 2.
  int crossover_errors = 0;
  int crossover_cases = 0;
  const auto equal = PolarizationState::from_bloch(std::numbers::pi / 2, 0.3);
  for (double w0 : {0.2e-3, 1e-3, 2.5e-3}) {
    const double boundary = w0 / std::sqrt(2.0);
    for (double f : {0.5, 0.9, 0.999, 1.001, 1.1, 2.0}) {
      const BeamParams beam(kK, w0, f * boundary);
      const bool wins = qfi_mach_zehnder(beam, equal) > qfi_beam_deflection(beam);
      if (wins != (f > 1.0)) ++crossover_errors;
      ++crossover_cases;
    }
  }
  return {violations == 0 && crossover_errors == 0,
          std::to_string(violations) + "/" + std::to_string(draws) +
              " ordering violations; " + std::to_string(crossover_errors) + "/" +
              std::to_string(crossover_cases) + " crossover misclassifications"};
}

Verdict criterion9() {
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool pass = true;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"position", R"("z": "5z_R")"},
      {"quadrant", R"("z": "5z_R")"},
      {"sagnac_polarization", R"("z": "0m")"}};
  for (const auto& [scheme, z] : runs) {
    const cli::ScenarioConfig cfg = cli::parse_config_text(
        R"({"beam": {"wavelength": "633nm", "w0": "1mm", "xi": "1mm"},
            "scheme": {"type": ")" +
        scheme + R"("}, "polarization": {"state": "+"},
            "grid": {"theta": "1urad", )" +
        z + R"(}, "montecarlo": {"nu": 10000, "trials": 200, "seed": 20240611}})");
    const auto rows = cli::montecarlo_rows(cfg, cfg.montecarlo->seed, 0);
    const SaturationReport& r = rows.at(0).report;
    const bool ok = r.ratio >= 0.85 && r.ratio <= 1.25 && r.non_interior_fraction() <= 0.05;
    pass = pass && ok;
    detail << scheme << " ratio " << sci(r.ratio) << " (" << r.non_interior << " non-interior); ";
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  pass = pass && seconds < 300.0;
  detail << "band [0.85, 1.25], " << sci(seconds) << " s";
  return {pass, detail.str()};
}

// Points of the n-th polyline tagged with `label`, in document order.
std::vector<std::pair<double, double>> polyline(const std::string& svg, const std::string& label,
                                                int n) {
  const std::string tag = "data-series=\"" + label + "\"";
  std::size_t at = 0;
  for (int i = 0; i <= n; ++i) {
    at = svg.find(tag, i == 0 ? 0 : at + 1);
    if (at == std::string::npos) return {};
  }
  const std::size_t begin = svg.find("points=\"", at) + 8;
  const std::size_t end = svg.find('"', begin);
  std::vector<std::pair<double, double>> pts;
  std::istringstream in(svg.substr(begin, end - begin));
  std::string pair;
  while (in >> pair) {
    const auto comma = pair.find(',');
    pts.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
  }
  return pts;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict criterion10() {
  const auto dir = std::filesystem::temp_directory_path() / "tiltsense_acceptance_figures";
  std::filesystem::remove_all(dir);
  cli::RunOptions options;
  options.out_dir = dir;
  const cli::ScenarioConfig cfg = cli::figure_defaults();
  cli::cmd_figure3(cfg, options);
  cli::cmd_figure4(cfg, options);
  const double zr = cfg.rayleigh_range();
  const double w0 = cfg.w0;
  std::vector<std::string> failures;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };

  // Figure 3 CSV against the conditioned-information closed form.
  Worst pointwise;
  const auto a = cli::read_csv(dir / "figure3a.csv");
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const double want = fbar_over_k2(zr, a.number(i, "xi"), a.number(i, "z"), a.number(i, "x"));
    const double got = a.number(i, "fbar_over_k2");
    pointwise.check(std::abs(got - want) / std::max(want, 1e-12), 1e-9);
  }
  const auto b = cli::read_csv(dir / "figure3b.csv");
  double flat_lo = INFINITY, flat_hi = 0.0;
  bool ordered = true;
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    const double xi = b.number(i, "xi");
    const double x = b.number(i, "x");
    const double got = b.number(i, "fbar_over_k2");
    const double want = fbar_over_k2(zr, xi, b.number(i, "z"), x);
    pointwise.check(std::abs(got - want) / std::max(want, 1e-12), 1e-9);
    if (x == xi) {
      flat_lo = std::min(flat_lo, got);
      flat_hi = std::max(flat_hi, got);
    }
    // x = 1.5 mm above x = xi above x = 0 at every z.
    ordered = ordered && (x == 0.0 ? got < 16.0 * xi * xi : x > xi ? got > 16.0 * xi * xi : true);
  }
  require(pointwise.ok, "figure 3 pointwise deviation " + sci(pointwise.value));
  require((flat_hi - flat_lo) / flat_hi < 1e-9, "x = xi curve not flat");
  require(ordered, "figure 3b curve ordering");

  // Figure 4 CSV: normalization and the decomposition identity per panel.
  const auto f4 = cli::read_csv(dir / "figure4.csv");
  Worst mass, info;
  for (double xi : {0.0, 1e-3}) {
    for (double z : {0.0, 5.0 * zr}) {
      double m = 0.0, s = 0.0;
      std::size_t prev = f4.rows.size();
      for (std::size_t i = 0; i < f4.rows.size(); ++i) {
        if (f4.number(i, "xi") != xi || f4.number(i, "z") != z) continue;
        if (prev != f4.rows.size()) {
          const double h = f4.number(i, "x") - f4.number(prev, "x");
          m += 0.5 * h * (f4.number(i, "p") + f4.number(prev, "p"));
          s += 0.5 * h * (f4.number(i, "p_fbar_over_k2") + f4.number(prev, "p_fbar_over_k2"));
        }
        prev = i;
      }
      mass.check(std::abs(m - 1.0), 1e-9);
      info.check(rel(s, 16.0 * (w0 * w0 / 4.0 + xi * xi)), 1e-5);
    }
  }
  require(mass.ok, "figure 4 normalization " + sci(mass.value));
  require(info.ok, "figure 4 integrated information " + sci(info.value));

  // SVG features.
  const std::string svg3 = slurp(dir / "figure3.svg");
  const std::string svg4 = slurp(dir / "figure4.svg");
  for (const char* label : {"xi = 0", "xi = 1 mm", "x = 0", "x = 1 mm", "x = 1.5 mm"}) {
    require(!polyline(svg3, label, 0).empty(), std::string("missing curve ") + label);
  }
  const auto flat = polyline(svg3, "x = 1 mm", 0);
  bool flat_svg = !flat.empty();
  for (const auto& p : flat) flat_svg = flat_svg && p.second == flat.front().second;
  require(flat_svg, "x = xi polyline not horizontal");
  // Screen y grows downward: the x = 1.5 mm curve sits above x = 1 mm above x = 0.
  const auto c0 = polyline(svg3, "x = 0", 0);
  const auto c15 = polyline(svg3, "x = 1.5 mm", 0);
  bool svg_order = c0.size() == flat.size() && c15.size() == flat.size();
  for (std::size_t i = 1; svg_order && i < flat.size(); ++i) {
    svg_order = c15[i].second < flat[i].second && flat[i].second < c0[i].second;
  }
  require(svg_order, "figure 3b SVG curve ordering");

  // First figure 4 panel is xi = 0, z = 0: zero at the center, peaks off-center.
  const auto near = polyline(svg4, "P Fbar/k^2", 0);
  std::vector<double> xs;
  for (std::size_t i = 0; i < f4.rows.size(); ++i) {
    if (f4.number(i, "xi") == 0.0 && f4.number(i, "z") == 0.0) xs.push_back(f4.number(i, "x"));
  }
  bool off_center = !near.empty() && near.size() == xs.size();
  if (off_center) {
    const auto top = std::min_element(near.begin(), near.end(), [](auto& l, auto& r) {
      return l.second < r.second;
    });
    const double baseline =
        std::max_element(near.begin(), near.end(), [](auto& l, auto& r) {
          return l.second < r.second;
        })->second;
    const std::size_t peak = static_cast<std::size_t>(top - near.begin());
    const std::size_t center = static_cast<std::size_t>(
        std::min_element(xs.begin(), xs.end(),
                         [](double l, double r) { return std::abs(l) < std::abs(r); }) -
        xs.begin());
    off_center = std::abs(xs[peak]) > 0.25 * w0 && std::abs(near[center].second - baseline) < 0.5;
  }
  require(off_center, "figure 4 near-field maxima not off-center");

  std::string detail = "figure 3 pointwise max deviation " + sci(pointwise.value) +
                       ", figure 4 information deviation " + sci(info.value) +
                       ", SVG features checked";
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"quadrant-to-QFI ratio tends to 2/pi", criterion1},
      {"position measurement saturates in the far field", criterion2},
      {"polarization measurement saturates the QFI", criterion3},
      {"joint density marginalizes consistently", criterion4},
      {"decomposition identity", criterion5},
      {"critical-point flatness", criterion6},
      {"numeric oracle equivalence", criterion7},
      {"QFI ordering and Mach-Zehnder crossover", criterion8},
      {"Monte Carlo Cramer-Rao saturation", criterion9},
      {"figure reproduction", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
