#include "tiltsense/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "tiltsense/errors.hpp"
#include "tiltsense/fisher.hpp"
#include "tiltsense/oracle.hpp"
#include "tiltsense/parallel.hpp"

#ifndef TILTSENSE_VERSION
#define TILTSENSE_VERSION "0.0.0"
#endif

namespace tiltsense::cli {
namespace {

constexpr double kMm = 1e-3;

struct GridPoint {
  double xi;
  double z;
  double theta;
};

void require_scheme(const ScenarioConfig& cfg) {
  if (cfg.scheme_type.empty()) throw ConfigError("/scheme", "missing");
}

std::vector<GridPoint> grid_points(const ScenarioConfig& cfg) {
  if (cfg.theta.empty()) throw ConfigError("/grid/theta", "missing");
  const std::vector<double> zs = cfg.z.empty() ? std::vector<double>{0.0} : cfg.z;
  std::vector<GridPoint> points;
  for (double xi : cfg.xi) {
    for (double z : zs) {
      for (double theta : cfg.theta) points.push_back({xi, z, theta});
    }
  }
  return points;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::string join_notes(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + ";" + b;
}

nlohmann::json metadata(const std::string& command, const ScenarioConfig& cfg) {
  return {{"generator", "tiltsense"},
          {"version", TILTSENSE_VERSION},
          {"command", command},
          {"config", cfg.source}};
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

std::vector<double> scaled_to_max(std::vector<double> v) {
  const double m = max_of(v);
  if (m > 0.0) {
    for (double& x : v) x /= m;
  }
  return v;
}

bool even_in_theta(const BeamParams& beam, const Scheme& scheme) {
  const auto* s = std::get_if<SagnacPolarization>(&scheme);
  if (!s) return false;
  return beam.xi() == 0.0 || s->pol.coherence() == 0.0 ||
         std::abs(std::sin(s->pol.relative_phase())) < 1e-12;
}

CommandResult write_figure(const FigureData& fig, const std::string& name,
                           const ScenarioConfig& cfg, const RunOptions& options) {
  CommandResult result;
  const nlohmann::json meta = metadata(name, cfg);
  for (std::size_t i = 0; i < fig.tables.size(); ++i) {
    result.files.push_back(
        write_table(fig.tables[i], options.out_dir, fig.stems[i], options.format, meta));
  }
  const auto svg = options.out_dir / (name + ".svg");
  write_text(svg, render_svg(fig.panels, fig.columns));
  result.files.push_back(svg);
  return result;
}

}  // namespace

Table fisher_table(const ScenarioConfig& cfg, int threads) {
  require_scheme(cfg);
  const auto points = grid_points(cfg);
  const double nu = cfg.montecarlo ? static_cast<double>(cfg.montecarlo->nu) : 1.0;
  Table table;
  table.columns = {"scheme",  "xi",  "z",        "theta",           "analytic",
                   "numeric", "qfi", "ratio_to_qfi", "cr_bound",    "nu",
                   "oracle_rel_error", "oracle_excluded_mass", "warnings"};
  table.rows = par::map_indexed(
      points.size(),
      [&](std::size_t i) {
        const GridPoint& p = points[i];
        const BeamParams beam = cfg.beam(p.xi);
        const FisherReport r = fisher_report(beam, cfg.scheme(p.z), p.theta, nu);
        return std::vector<Cell>{cfg.scheme_type,
                                 p.xi,
                                 p.z,
                                 p.theta,
                                 r.analytic,
                                 r.numeric,
                                 r.qfi,
                                 r.ratio,
                                 r.cr_bound,
                                 nu,
                                 r.oracle_rel_error,
                                 r.oracle_excluded_mass,
                                 join_notes(r.flags.to_string(), r.notes)};
      },
      threads);
  return table;
}

Table sweep_table(const ScenarioConfig& cfg, int threads) {
  require_scheme(cfg);
  const auto points = grid_points(cfg);
  Table table;
  table.columns = {"scheme", "xi",      "z",       "theta",   "fisher",
                   "qfi",    "ratio_to_qfi", "p_plus", "p_minus", "warnings"};
  table.rows = par::map_indexed(
      points.size(),
      [&](std::size_t i) {
        const GridPoint& p = points[i];
        const BeamParams beam = cfg.beam(p.xi);
        const Scheme scheme = cfg.scheme(p.z);
        const double f = scheme_fisher(beam, scheme, p.theta);
        const double qfi = scheme_qfi(beam, scheme);
        double plus = std::nan("");
        double minus = std::nan("");
        if (const auto* q = std::get_if<Quadrant>(&scheme)) {
          const auto pr = quadrant_probabilities(beam, p.theta, q->z, q->split);
          plus = pr.plus;
          minus = pr.minus;
        } else if (const auto* s = std::get_if<SagnacPolarization>(&scheme)) {
          const auto pr = sagnac_polarization_probabilities(beam, s->pol, p.theta);
          plus = pr.plus;
          minus = pr.minus;
        }
        std::string notes = regime_flags(beam, p.theta).to_string();
        if (std::isnan(f)) notes = join_notes(notes, "no_closed_form");
        return std::vector<Cell>{cfg.scheme_type, p.xi,  p.z,   p.theta, f,
                                 qfi,             qfi > 0.0 ? f / qfi : std::nan(""),
                                 plus,            minus, notes};
      },
      threads);
  return table;
}

ScenarioConfig figure_defaults() {
  ScenarioConfig cfg;
  cfg.k = 2.0 * std::numbers::pi / 633e-9;
  cfg.w0 = std::sqrt(2.0 * 1.0 / cfg.k);
  cfg.source = nlohmann::json{{"beam", {{"wavelength", "633nm"}, {"rayleigh_range", "1m"}}}};
  return cfg;
}

FigureData figure3_data(const ScenarioConfig& cfg, int threads) {
  const double zr = cfg.rayleigh_range();
  const double k2 = cfg.k * cfg.k;
  FigureData fig;

  // Panel a: Fbar/k^2 against x at z = 5 z_R.
  const double za = 5.0 * zr;
  const std::vector<double> xs = cfg.x.empty() ? linspace(-3.0 * kMm, 3.0 * kMm, 601) : cfg.x;
  const std::vector<double> xis{0.0, 1.0 * kMm};
  Table a;
  a.columns = {"xi", "z", "x", "fbar_over_k2"};
  Panel pa{"a) z = 5 z_R", "x (mm)", "Fbar/k^2 (mm^2)", {}};
  const std::vector<std::pair<std::string, std::string>> styles_a{{"black", ""},
                                                                  {"#d62728", "7,4"}};
  for (std::size_t s = 0; s < xis.size(); ++s) {
    const BeamParams beam = cfg.beam(xis[s]);
    const auto values = par::map_indexed(
        xs.size(), [&](std::size_t i) { return fisher_conditioned(beam, za, xs[i], 0.0) / k2; },
        threads);
    Series series{"xi = " + std::string(s == 0 ? "0" : "1 mm"), {}, {}, styles_a[s].first,
                  styles_a[s].second};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      a.rows.push_back({xis[s], za, xs[i], values[i]});
      series.x.push_back(xs[i] / kMm);
      series.y.push_back(values[i] / (kMm * kMm));
    }
    pa.series.push_back(std::move(series));
  }

  // Panel b: Fbar/k^2 against z at fixed detector positions, xi = 1 mm.
  const std::vector<double> zs = cfg.z.empty() ? linspace(0.0, 10.0 * zr, 401) : cfg.z;
  const std::vector<double> detectors{0.0, 1.0 * kMm, 1.5 * kMm};
  const std::vector<std::pair<std::string, std::string>> styles_b{
      {"black", ""}, {"#d62728", "2,3"}, {"#7f7f7f", "7,4"}};
  const std::vector<std::string> names{"x = 0", "x = 1 mm", "x = 1.5 mm"};
  const BeamParams beam = cfg.beam(1.0 * kMm);
  Table b;
  b.columns = {"xi", "x", "z", "fbar_over_k2"};
  Panel pb{"b) xi = 1 mm", "z / z_R", "Fbar/k^2 (mm^2)", {}};
  for (std::size_t s = 0; s < detectors.size(); ++s) {
    const auto values = par::map_indexed(
        zs.size(),
        [&](std::size_t i) { return fisher_conditioned(beam, zs[i], detectors[s], 0.0) / k2; },
        threads);
    Series series{names[s], {}, {}, styles_b[s].first, styles_b[s].second};
    for (std::size_t i = 0; i < zs.size(); ++i) {
      b.rows.push_back({beam.xi(), detectors[s], zs[i], values[i]});
      series.x.push_back(zs[i] / zr);
      series.y.push_back(values[i] / (kMm * kMm));
    }
    pb.series.push_back(std::move(series));
  }

  fig.tables = {std::move(a), std::move(b)};
  fig.stems = {"figure3a", "figure3b"};
  fig.panels = {std::move(pa), std::move(pb)};
  fig.columns = 2;
  return fig;
}

FigureData figure4_data(const ScenarioConfig& cfg, int threads) {
  const double zr = cfg.rayleigh_range();
  const double k2 = cfg.k * cfg.k;
  const auto plus = PolarizationState::diagonal();
  const std::vector<double> xis{0.0, 1.0 * kMm};
  const std::vector<double> planes{0.0, 5.0 * zr};
  FigureData fig;
  Table t;
  t.columns = {"xi", "z", "x", "p", "p_fbar_over_k2"};
  for (double xi : xis) {
    const BeamParams beam = cfg.beam(xi);
    for (double z : planes) {
      const double w = width(beam, z);
      const std::vector<double> xs =
          cfg.x.empty() ? linspace(xis.front() - 6.0 * w, xis.back() + 6.0 * w, 1201) : cfg.x;
      const auto rows = par::map_indexed(
          xs.size(),
          [&](std::size_t i) {
            const double p = detection_density(beam, plus, 0.0, z, xs[i]);
            return std::pair{p, p * fisher_conditioned(beam, z, xs[i], 0.0) / k2};
          },
          threads);
      std::vector<double> px, pf, xmm;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        t.rows.push_back({xi, z, xs[i], rows[i].first, rows[i].second});
        px.push_back(rows[i].first);
        pf.push_back(rows[i].second);
        xmm.push_back(xs[i] / kMm);
      }
      Panel panel{std::string("xi = ") + (xi == 0.0 ? "0" : "1 mm") + ", z = " +
                      (z == 0.0 ? "0" : "5 z_R"),
                  "x (mm)", "scaled to maximum", {}};
      panel.series.push_back({"P Fbar/k^2", xmm, scaled_to_max(pf), "black", ""});
      panel.series.push_back({"P(x)", xmm, scaled_to_max(px), "#7f7f7f", "7,4"});
      fig.panels.push_back(std::move(panel));
    }
  }
  fig.tables = {std::move(t)};
  fig.stems = {"figure4"};
  fig.columns = 2;
  return fig;
}

std::vector<MonteCarloRow> montecarlo_rows(const ScenarioConfig& cfg, std::uint64_t seed,
                                           int threads) {
  require_scheme(cfg);
  if (!cfg.montecarlo) throw ConfigError("/montecarlo", "missing");
  const MonteCarloConfig& mc = *cfg.montecarlo;
  const auto points = grid_points(cfg);
  std::vector<MonteCarloRow> rows;
  for (std::size_t r = 0; r < points.size(); ++r) {
    const GridPoint& p = points[r];
    const BeamParams beam = cfg.beam(p.xi);
    const Scheme scheme = cfg.scheme(p.z);
    const SchemeModel model(beam, scheme);
    double f = scheme_fisher(beam, scheme, p.theta);
    if (std::isnan(f)) {
      f = numeric_fisher_oracle(model, p.theta, default_fd_step(p.theta)).fisher;
    }
    Interval search{};
    if (mc.search) {
      search = *mc.search;
    } else {
      if (!(f > 0.0)) {
        throw ConfigError("/montecarlo/search",
                          "Fisher information vanishes at this grid point; give an explicit "
                          "search interval");
      }
      const double half = mc.half_width_sigma / std::sqrt(static_cast<double>(mc.nu) * f);
      search = {p.theta - half, p.theta + half};
      if (even_in_theta(beam, scheme)) {
        // theta and -theta are indistinguishable; stay on the side of theta.
        if (p.theta > 0.0) search.lo = std::max(search.lo, 0.0);
        if (p.theta < 0.0) search.hi = std::min(search.hi, 0.0);
      }
    }
    const MonteCarloPlan plan{p.theta, mc.nu, mc.trials, seed + r, search, f};
    const SaturationReport report = summarize(par::run_trials(model, plan, threads), plan);
    const bool gated = mc.nu >= 10000 && mc.trials >= 200;
    const bool pass = !gated || (report.non_interior_fraction() <= 0.05 && report.saturated() &&
                                 report.respects_cramer_rao());
    rows.push_back({cfg.scheme_type, p.xi, p.z, p.theta, f, search, report, gated, pass});
  }
  return rows;
}

Table montecarlo_table(const std::vector<MonteCarloRow>& rows, const MonteCarloConfig& mc,
                       std::uint64_t seed) {
  Table table;
  table.columns = {"scheme",     "xi",         "z",          "theta_true",
                   "nu",         "trials",     "seed",       "search_lo",
                   "search_hi",  "fisher",     "used",       "non_interior",
                   "mean_theta_hat", "empirical_variance", "cr_variance", "ratio",
                   "check"};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const MonteCarloRow& row = rows[r];
    const SaturationReport& s = row.report;
    table.rows.push_back({row.scheme, row.xi, row.z, row.theta_true, mc.nu, mc.trials,
                          seed + r, row.search.lo, row.search.hi, row.fisher, s.used,
                          s.non_interior, s.mean_theta_hat, s.empirical_variance,
                          s.cr_variance, s.ratio,
                          std::string(!row.gated ? "n/a" : row.pass ? "pass" : "fail")});
  }
  return table;
}

CommandResult cmd_fisher(const ScenarioConfig& cfg, const RunOptions& options) {
  CommandResult result;
  result.files.push_back(write_table(fisher_table(cfg, options.threads), options.out_dir,
                                     "fisher", options.format, metadata("fisher", cfg)));
  return result;
}

CommandResult cmd_sweep(const ScenarioConfig& cfg, const RunOptions& options) {
  CommandResult result;
  result.files.push_back(write_table(sweep_table(cfg, options.threads), options.out_dir, "sweep",
                                     options.format, metadata("sweep", cfg)));
  return result;
}

CommandResult cmd_figure3(const ScenarioConfig& cfg, const RunOptions& options) {
  return write_figure(figure3_data(cfg, options.threads), "figure3", cfg, options);
}

CommandResult cmd_figure4(const ScenarioConfig& cfg, const RunOptions& options) {
  return write_figure(figure4_data(cfg, options.threads), "figure4", cfg, options);
}

CommandResult cmd_montecarlo(const ScenarioConfig& cfg, const RunOptions& options) {
  if (!cfg.montecarlo) throw ConfigError("/montecarlo", "missing");
  const std::uint64_t seed = options.seed.value_or(cfg.montecarlo->seed);
  const auto rows = montecarlo_rows(cfg, seed, options.threads);
  nlohmann::json meta = metadata("montecarlo", cfg);
  meta["seed"] = seed;
  CommandResult result;
  result.files.push_back(write_table(montecarlo_table(rows, *cfg.montecarlo, seed),
                                     options.out_dir, "montecarlo", options.format, meta));
  std::ostringstream msg;
  for (const MonteCarloRow& row : rows) {
    if (row.pass) continue;
    result.exit_code = kExitStatistical;
    msg << "statistical check failed at xi=" << row.xi << " z=" << row.z
        << " theta=" << row.theta_true << ": ratio " << row.report.ratio
        << " (band [0.85, 1.25]), non-interior fraction "
        << row.report.non_interior_fraction() << " (limit 0.05)\n";
  }
  result.message = msg.str();
  return result;
}

std::string describe_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out.precision(6);
  out << "beam: k = " << cfg.k << " rad/m, lambda = " << 2.0 * std::numbers::pi / cfg.k
      << " m, w0 = " << cfg.w0 << " m, z_R = " << cfg.rayleigh_range() << " m, xi values = "
      << cfg.xi.size() << "\n";
  out << "scheme: " << (cfg.scheme_type.empty() ? "(none)" : cfg.scheme_type) << "\n";
  out << "polarization: d = " << cfg.pol.coherence() << ", phi = " << cfg.pol.relative_phase()
      << ", <sz> = " << cfg.pol.sigma_z_mean() << "\n";
  out << "grid: theta " << cfg.theta.size() << ", z " << cfg.z.size() << ", x " << cfg.x.size()
      << "\n";
  if (cfg.montecarlo) {
    out << "montecarlo: nu = " << cfg.montecarlo->nu << ", trials = " << cfg.montecarlo->trials
        << ", seed = " << cfg.montecarlo->seed << "\n";
  }
  return out.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tilt-angle estimation toolkit: Fisher information, Cramer-Rao bounds and "
               "Monte Carlo maximum likelihood for Gaussian-beam deflection schemes",
               "tiltsense"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", TILTSENSE_VERSION);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "csv";
  std::vector<CLI::Option*> seed_options;

  auto add = [&](const char* name, const char* help, bool needs_config) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* c = sub->add_option("--config", config_path, "JSON scenario file");
    if (needs_config) c->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    seed_options.push_back(sub->add_option("--seed", seed, "override montecarlo.seed"));
    sub->add_option("--threads", threads, "worker threads, 0 for the OpenMP default")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", format, "table format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    return sub;
  };
  CLI::App* fisher = add("fisher", "closed-form vs numeric Fisher information and QFI", true);
  CLI::App* sweep = add("sweep", "closed-form Fisher information and probabilities", true);
  CLI::App* fig3 = add("figure3", "conditioned polarization information maps", false);
  CLI::App* fig4 = add("figure4", "detection-weighted information profiles", false);
  add("montecarlo", "Monte Carlo MLE against the Cramer-Rao bound", true);
  CLI::App* validate = add("validate-config", "parse a scenario file and summarize it", true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunOptions options;
  options.out_dir = out_dir;
  options.threads = threads;
  options.format = format == "json" ? Format::json : Format::csv;
  for (auto* o : seed_options) {
    if (o->count() > 0) options.seed = seed;
  }

  return run_guarded(
      [&]() -> CommandResult {
        const ScenarioConfig cfg = config_path.empty() ? figure_defaults() : load_config(config_path);
        if (validate->parsed()) {
          CommandResult result;
          result.message = describe_config(cfg);
          return result;
        }
        if (fisher->parsed()) return cmd_fisher(cfg, options);
        if (sweep->parsed()) return cmd_sweep(cfg, options);
        if (fig3->parsed()) return cmd_figure3(cfg, options);
        if (fig4->parsed()) return cmd_figure4(cfg, options);
        return cmd_montecarlo(cfg, options);
      },
      out, err);
}

int run_guarded(const std::function<CommandResult()>& command, std::ostream& out,
                std::ostream& err) {
  try {
    const CommandResult result = command();
    for (const auto& f : result.files) out << "wrote " << f.string() << "\n";
    if (!result.message.empty()) (result.exit_code == kExitOk ? out : err) << result.message;
    return result.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const StatisticalCheckError& e) {
    err << "statistical check failed: " << e.what() << "\n";
    return kExitStatistical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace tiltsense::cli
