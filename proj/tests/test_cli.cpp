#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "tiltsense/cli/commands.hpp"
#include "tiltsense/cli/units.hpp"
#include "tiltsense/errors.hpp"

using namespace tiltsense;
using namespace tiltsense::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tiltsense_test_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error_where(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "";
}

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "tiltsense");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

const char* kBeam = R"("beam": {"wavelength": "633nm", "w0": "1mm")";

}  // namespace

TEST_CASE("unit parsing") {
  CHECK(parse_length("633nm") == doctest::Approx(633e-9).epsilon(1e-15));
  CHECK(parse_length("1.5 mm") == doctest::Approx(1.5e-3).epsilon(1e-15));
  CHECK(parse_length("2e-3m") == doctest::Approx(2e-3).epsilon(1e-15));
  CHECK(parse_length("5z_R", 0.5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(parse_angle("1urad") == doctest::Approx(1e-6).epsilon(1e-15));
  CHECK(parse_angle("1µrad") == doctest::Approx(1e-6).epsilon(1e-15));
  CHECK(parse_angle("180deg") == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(parse_energy("1nJ") == doctest::Approx(1e-9).epsilon(1e-15));
  CHECK(parse_wavenumber("1/um") == doctest::Approx(1e6).epsilon(1e-15));

  CHECK_THROWS_AS(parse_length("1"), UnitError);
  CHECK_THROWS_AS(parse_length("1furlong"), UnitError);
  CHECK_THROWS_AS(parse_length("5z_R"), UnitError);  // no Rayleigh range to resolve
  CHECK_THROWS_AS(parse_angle("1mm"), UnitError);
  CHECK_THROWS_AS(parse_angle("rad"), UnitError);
}

TEST_CASE("config validation reports the offending field") {
  const std::string beam = std::string("{") + kBeam + "}}";
  CHECK(config_error_where(std::string("{") + kBeam + R"(}, "grid": {"z": []}})") == "/grid/z");
  CHECK(config_error_where(std::string("{") + kBeam + R"(}, "grid": {"z": ["2mm", "1mm"]}})") ==
        "/grid/z/1");
  CHECK(config_error_where(std::string("{") + kBeam + R"(}, "bogus": 1})") == "/bogus");
  CHECK(config_error_where(R"({"beam": {"wavelength": "633nm", "w0": "1"}})") == "/beam/w0");
  CHECK(config_error_where(std::string("{") + kBeam + R"(}, "scheme": {"type": "laser"}})") ==
        "/scheme/type");
  CHECK(config_error_where(R"({"scheme": {"type": "quadrant"}})") == "/beam");
  CHECK(config_error_where("{\n \"beam\": {\"wavelength\": \"633nm\",\n  \"w0\": 1mm}}") ==
        "line 3, column 10");
  CHECK(config_error_where(beam).empty());
}

TEST_CASE("config resolves Rayleigh ranges, grids and photon energy") {
  const ScenarioConfig cfg = parse_config_text(R"({
    "beam": {"wavelength": "633nm", "rayleigh_range": "1m", "xi": ["0mm", "1mm"]},
    "scheme": {"type": "quadrant", "split": "origin"},
    "grid": {"theta": {"start": "0rad", "stop": "1urad", "count": 5}, "z": "5z_R"},
    "montecarlo": {"energy": "1fJ", "trials": 10}
  })");
  CHECK(cfg.rayleigh_range() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cfg.xi == std::vector<double>{0.0, 1e-3});
  CHECK(cfg.split == SplitLine::origin);
  REQUIRE(cfg.theta.size() == 5);
  CHECK(cfg.theta[4] == 1e-6);
  REQUIRE(cfg.z.size() == 1);
  CHECK(cfg.z[0] == doctest::Approx(5.0).epsilon(1e-14));
  // 1 fJ of 633 nm light: floor(E lambda / (h c)) photons.
  const double photon = 6.62607015e-34 * 299792458.0 / 633e-9;
  REQUIRE(cfg.montecarlo);
  CHECK(cfg.montecarlo->nu == static_cast<std::uint64_t>(std::floor(1e-15 / photon)));
  CHECK(cfg.montecarlo->trials == 10);
}

TEST_CASE("tables format numbers independently of locale and round-trip through CSV") {
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
  CHECK(format_number(-2.0) == "-2.0000000000000000e+00");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");

  Table t;
  t.columns = {"name", "value", "count"};
  t.rows.push_back({std::string("a,b"), 1.0 / 3.0, std::uint64_t{7}});
  t.rows.push_back({std::string("say \"hi\""), 2.5e-300, std::uint64_t{0}});
  const CsvData back = parse_csv(to_csv(t));
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0][0] == "a,b");
  CHECK(back.rows[1][0] == "say \"hi\"");
  CHECK(back.number(0, "value") == 1.0 / 3.0);
  CHECK(back.number(1, "value") == 2.5e-300);
  CHECK(back.rows[0][2] == "7");

  const auto j = nlohmann::json::parse(to_json_text(t));
  CHECK(j["columns"].size() == 3);
  CHECK(j["rows"][0]["count"] == 7);
}

TEST_CASE("quadrant sweep approaches 2/pi of the QFI in the far field") {
  const ScenarioConfig cfg = parse_config_text(std::string("{") + kBeam + R"(},
    "scheme": {"type": "quadrant"},
    "grid": {"theta": "0rad", "z": {"start": "0z_R", "stop": "10z_R", "count": 41}}})");
  for (int threads : {1, 3}) {
    const Table t = fisher_table(cfg, threads);
    REQUIRE(t.rows.size() == 41);
    double previous = -1.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const double ratio = t.number(i, "ratio_to_qfi");
      CHECK(ratio > previous);
      CHECK(ratio < 2.0 / std::numbers::pi);
      previous = ratio;
    }
    const double z = t.number(40, "z");
    const double zr = cfg.rayleigh_range();
    CHECK(previous == doctest::Approx(2.0 / std::numbers::pi * z * z / (z * z + zr * zr))
                          .epsilon(1e-12));
  }
  const ScenarioConfig far = parse_config_text(std::string("{") + kBeam + R"(},
    "scheme": {"type": "quadrant"}, "grid": {"theta": "0rad", "z": "100z_R"}})");
  CHECK(std::abs(fisher_table(far, 1).number(0, "ratio_to_qfi") - 2.0 / std::numbers::pi) <
        1e-4);
}

TEST_CASE("Sagnac polarization information scales with the displacement") {
  const ScenarioConfig cfg = parse_config_text(R"({
    "beam": {"wavelength": "633nm", "w0": "1mm", "xi": ["0mm", "1mm"]},
    "scheme": {"type": "sagnac_polarization"},
    "grid": {"theta": "1nrad"}})");
  const Table t = fisher_table(cfg, 1);
  REQUIRE(t.rows.size() == 2);
  const double v = 0.25e-6;
  CHECK(t.number(1, "analytic") / t.number(0, "analytic") ==
        doctest::Approx((v + 1e-6) / v).epsilon(1e-8));
  CHECK(t.number(1, "numeric") / t.number(0, "numeric") ==
        doctest::Approx((v + 1e-6) / v).epsilon(1e-6));

  const Table s = sweep_table(cfg, 1);
  CHECK(s.number(0, "p_plus") + s.number(0, "p_minus") == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grid points without theta or a scheme are rejected") {
  const ScenarioConfig no_theta =
      parse_config_text(std::string("{") + kBeam + R"(}, "scheme": {"type": "position"}})");
  CHECK_THROWS_AS(fisher_table(no_theta, 1), ConfigError);
  const ScenarioConfig no_scheme = parse_config_text(std::string("{") + kBeam + "}}");
  CHECK_THROWS_AS(sweep_table(no_scheme, 1), ConfigError);
}

TEST_CASE("figure 3 data") {
  const ScenarioConfig cfg = figure_defaults();
  CHECK(cfg.rayleigh_range() == doctest::Approx(1.0).epsilon(1e-14));
  const FigureData fig = figure3_data(cfg, 2);
  REQUIRE(fig.tables.size() == 2);
  const Table& a = fig.tables[0];
  const Table& b = fig.tables[1];

  // Panel a, xi = 0 at x = 0: Fbar vanishes.
  bool found_center = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.number(i, "xi") == 0.0 && a.number(i, "x") == 0.0) {
      found_center = true;
      CHECK(a.number(i, "fbar_over_k2") == 0.0);
    }
  }
  CHECK(found_center);

  // Panel b: the x = xi curve is flat, the x = 0 curve rises toward 16 xi^2.
  double lo = INFINITY, hi = 0.0, previous = -1.0;
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    const double f = b.number(i, "fbar_over_k2");
    if (b.number(i, "x") == 1e-3) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    } else if (b.number(i, "x") == 0.0) {
      CHECK(f >= previous);
      previous = f;
    }
  }
  CHECK((hi - lo) / hi < 1e-9);
  CHECK(hi == doctest::Approx(16e-6).epsilon(1e-12));
  CHECK(previous < 16e-6);
  CHECK(previous > 0.9 * 16e-6);

  const std::string svg = render_svg(fig.panels, fig.columns);
  CHECK(svg.find("data-series=\"x = 1 mm\"") != std::string::npos);
  CHECK(svg.find("z / z_R") != std::string::npos);
}

TEST_CASE("figure 4 data integrates to the polarization information") {
  const ScenarioConfig cfg = figure_defaults();
  const FigureData fig = figure4_data(cfg, 2);
  REQUIRE(fig.tables.size() == 1);
  REQUIRE(fig.panels.size() == 4);
  const Table& t = fig.tables[0];
  const double w0 = cfg.w0;

  const double zr = cfg.rayleigh_range();
  for (double xi : {0.0, 1e-3}) {
    for (double z : {0.0, 5.0 * zr}) {
      double mass = 0.0, info = 0.0;
      std::vector<double> x, pf;
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.number(i, "xi") != xi || t.number(i, "z") != z) continue;
        x.push_back(t.number(i, "x"));
        pf.push_back(t.number(i, "p_fbar_over_k2"));
        if (x.size() > 1) {
          const double h = x[x.size() - 1] - x[x.size() - 2];
          mass += 0.5 * h * (t.number(i, "p") + t.number(i - 1, "p"));
          info += 0.5 * h * (pf[pf.size() - 1] + pf[pf.size() - 2]);
        }
      }
      REQUIRE(x.size() == 1201);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(info == doctest::Approx(16.0 * (w0 * w0 / 4.0 + xi * xi)).epsilon(1e-6));
      if (xi == 0.0) {
        // Symmetric about the axis with the maximum away from the center.
        const std::size_t peak = static_cast<std::size_t>(
            std::max_element(pf.begin(), pf.end()) - pf.begin());
        CHECK(std::abs(x[peak]) > 0.25 * w0);
      }
    }
  }
}

TEST_CASE("figure commands write CSV, sidecars and SVG") {
  const auto dir = scratch("figures");
  RunOptions options;
  options.out_dir = dir;
  const CommandResult r3 = cmd_figure3(figure_defaults(), options);
  const CommandResult r4 = cmd_figure4(figure_defaults(), options);
  CHECK(r3.files.size() == 3);
  CHECK(r4.files.size() == 2);
  for (const char* f : {"figure3a.csv", "figure3a.csv.meta.json", "figure3b.csv", "figure3.svg",
                        "figure4.csv", "figure4.csv.meta.json", "figure4.svg"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const auto meta = nlohmann::json::parse(slurp(dir / "figure4.csv.meta.json"));
  CHECK(meta["generator"] == "tiltsense");
  CHECK(meta["command"] == "figure4");
  CHECK(meta.contains("version"));
  CHECK(read_csv(dir / "figure3b.csv").columns ==
        std::vector<std::string>{"xi", "x", "z", "fbar_over_k2"});
}

TEST_CASE("Monte Carlo runs are reproducible byte for byte") {
  const ScenarioConfig cfg = parse_config_text(std::string("{") + kBeam + R"(},
    "scheme": {"type": "quadrant"},
    "grid": {"theta": "1urad", "z": "2z_R"},
    "montecarlo": {"nu": 2000, "trials": 40, "seed": 11}})");
  std::vector<std::string> csv;
  for (int threads : {1, 2, 1}) {
    const auto dir = scratch("mc" + std::to_string(csv.size()));
    RunOptions options;
    options.out_dir = dir;
    options.threads = threads;
    const CommandResult r = cmd_montecarlo(cfg, options);
    CHECK(r.exit_code == kExitOk);  // below the gating threshold: reported, not judged
    csv.push_back(slurp(dir / "montecarlo.csv") + slurp(dir / "montecarlo.csv.meta.json"));
  }
  CHECK(csv[0] == csv[1]);
  CHECK(csv[0] == csv[2]);
  const CsvData data = parse_csv(csv[0].substr(0, csv[0].find('{')));
  CHECK(data.rows.at(0).back() == "n/a");
  CHECK(data.number(0, "seed") == 11.0);

  RunOptions reseeded;
  reseeded.out_dir = scratch("mc_seed");
  reseeded.seed = 12;
  cmd_montecarlo(cfg, reseeded);
  CHECK(read_csv(reseeded.out_dir / "montecarlo.csv").number(0, "seed") == 12.0);
}

TEST_CASE("single-photon Monte Carlo completes without a verdict") {
  const ScenarioConfig cfg = parse_config_text(std::string("{") + kBeam + R"(},
    "scheme": {"type": "sagnac_polarization"},
    "polarization": {"state": "+"},
    "grid": {"theta": "1urad"},
    "montecarlo": {"nu": 1, "trials": 20, "seed": 3, "search": ["-1mrad", "1mrad"]}})");
  const auto rows = montecarlo_rows(cfg, 3, 1);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].gated);
  CHECK(rows[0].pass);
  const Table t = montecarlo_table(rows, *cfg.montecarlo, 3);
  CHECK(std::get<std::string>(t.rows[0].back()) == "n/a");
  CHECK(std::isfinite(t.number(0, "cr_variance")));
}

TEST_CASE("default search interval") {
  const ScenarioConfig cfg = parse_config_text(R"({
    "beam": {"wavelength": "633nm", "w0": "1mm", "xi": "1mm"},
    "scheme": {"type": "sagnac_polarization"},
    "grid": {"theta": "1urad"},
    "montecarlo": {"nu": 10000, "trials": 4}})");
  const auto rows = montecarlo_rows(cfg, 1, 1);
  const double half = 6.0 / std::sqrt(1e4 * rows[0].fisher);
  // Outcomes are even in theta here, so the interval stops at zero.
  CHECK(rows[0].search.lo == std::max(0.0, 1e-6 - half));
  CHECK(rows[0].search.hi == doctest::Approx(1e-6 + half).epsilon(1e-15));

  const ScenarioConfig flat = parse_config_text(std::string("{") + kBeam + R"(},
    "scheme": {"type": "position"}, "grid": {"theta": "0rad", "z": "0m"},
    "montecarlo": {"nu": 10}})");
  CHECK_THROWS_AS(montecarlo_rows(flat, 1, 1), ConfigError);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  const auto write = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    return (dir / name).string();
  };
  std::string text;
  const std::string good = write("good.json", std::string("{") + kBeam + R"(},
    "scheme": {"type": "quadrant"}, "grid": {"theta": "0rad", "z": ["1z_R", "2z_R"]}})");
  CHECK(run({"validate-config", "--config", good}, &text) == kExitOk);
  CHECK(text.find("scheme: quadrant") != std::string::npos);
  CHECK(run({"sweep", "--config", good, "--out", (dir / "o").string(), "--format", "json"},
            &text) == kExitOk);
  CHECK(text.find("sweep.json") != std::string::npos);
  CHECK(nlohmann::json::parse(slurp(dir / "o" / "sweep.json"))["rows"].size() == 2);

  const std::string empty_z =
      write("empty.json", std::string("{") + kBeam + R"(}, "grid": {"z": []}})");
  CHECK(run({"fisher", "--config", empty_z}, &text) == kExitConfig);
  CHECK(text.find("/grid/z") != std::string::npos);
  CHECK(run({"fisher", "--config", (dir / "missing.json").string()}) == kExitConfig);
  CHECK(run({"fisher"}) == kExitConfig);
  CHECK(run({"fisher", "--config", good, "--format", "xml"}) == kExitConfig);
  CHECK(run({"nonsense"}) == kExitConfig);
  CHECK(run({"--help"}) == kExitOk);

  // theta = 1 urad sits two CR widths from the fold at zero when xi = 0; the
  // truncated estimator cannot saturate and the run must say so.
  const std::string folded = write("folded.json", std::string("{") + kBeam + R"(},
    "scheme": {"type": "sagnac_polarization"}, "grid": {"theta": "1urad"},
    "montecarlo": {"nu": 10000, "trials": 200, "seed": 2024}})");
  CHECK(run({"montecarlo", "--config", folded, "--out", (dir / "mc").string()}, &text) ==
        kExitStatistical);
  CHECK(text.find("statistical check failed") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "mc" / "montecarlo.csv"));

  std::ostringstream out, err;
  CHECK(run_guarded([]() -> CommandResult { throw NumericalError("no convergence"); }, out,
                    err) == kExitNumerical);
  CHECK(run_guarded([]() -> CommandResult { throw StatisticalCheckError("x"); }, out, err) ==
        kExitStatistical);
  CHECK(run_guarded([]() -> CommandResult { throw std::runtime_error("x"); }, out, err) ==
        kExitFailure);
}
