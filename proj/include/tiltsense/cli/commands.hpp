#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tiltsense/cli/config.hpp"
#include "tiltsense/cli/svg.hpp"
#include "tiltsense/cli/table.hpp"
#include "tiltsense/estimate.hpp"

namespace tiltsense::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitStatistical = 4,
};

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides montecarlo.seed
  int threads = 0;                    // 0: OpenMP default
  Format format = Format::csv;
};

struct CommandResult {
  std::vector<std::filesystem::path> files;
  int exit_code = kExitOk;
  std::string message;  // diagnostics for a nonzero exit
};

// Table builders. Rows are computed in parallel and stored in grid order, so
// the output never depends on the thread count.

/// One row per (xi, z, theta): closed form, numeric oracle, QFI, ratio.
Table fisher_table(const ScenarioConfig& cfg, int threads);
/// Closed-form Fisher information and outcome probabilities, no oracle.
Table sweep_table(const ScenarioConfig& cfg, int threads);

struct FigureData {
  std::vector<Table> tables;        // one per CSV file
  std::vector<std::string> stems;   // file stems matching `tables`
  std::vector<Panel> panels;
  int columns = 2;
};

/// Beam defaults for figures: 633 nm and z_R = 1 m unless cfg overrides.
ScenarioConfig figure_defaults();

/// Conditioned polarization information Fbar/k^2 (theta -> 0).
/// Panel a: versus x at z = 5 z_R for xi in {0, 1mm}.
/// Panel b: versus z in [0, 10 z_R] at x in {0, 1, 1.5} mm with xi = 1 mm.
/// A config x grid replaces the panel-a x range; a z grid replaces panel b's.
FigureData figure3_data(const ScenarioConfig& cfg, int threads);

/// Detection density P(x) and P(x) Fbar(x)/k^2 for xi in {0, 1mm} at
/// z = 0 and z = 5 z_R. The SVG shows each curve scaled to its maximum.
FigureData figure4_data(const ScenarioConfig& cfg, int threads);

struct MonteCarloRow {
  std::string scheme;
  double xi;
  double z;
  double theta_true;
  double fisher;
  Interval search;
  SaturationReport report;
  bool gated;  // nu >= 1e4 and trials >= 200: the asymptotic checks apply
  bool pass;
};

/// Runs montecarlo.trials MLE trials per (xi, z, theta). Without an
/// explicit search interval it uses theta +- half_width_sigma / sqrt(nu F);
/// for outcome statistics even in theta the side across zero is clipped.
std::vector<MonteCarloRow> montecarlo_rows(const ScenarioConfig& cfg, std::uint64_t seed,
                                           int threads);
Table montecarlo_table(const std::vector<MonteCarloRow>& rows, const MonteCarloConfig& mc,
                       std::uint64_t seed);

CommandResult cmd_fisher(const ScenarioConfig& cfg, const RunOptions& options);
CommandResult cmd_sweep(const ScenarioConfig& cfg, const RunOptions& options);
CommandResult cmd_figure3(const ScenarioConfig& cfg, const RunOptions& options);
CommandResult cmd_figure4(const ScenarioConfig& cfg, const RunOptions& options);
CommandResult cmd_montecarlo(const ScenarioConfig& cfg, const RunOptions& options);
/// Human-readable summary of a parsed config.
std::string describe_config(const ScenarioConfig& cfg);

/// Runs a command, prints the written files and maps failures to exit codes:
/// ConfigError 2, NumericalError 3, StatisticalCheckError 4, anything else 1.
int run_guarded(const std::function<CommandResult()>& command, std::ostream& out,
                std::ostream& err);

/// Whole command-line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tiltsense::cli
