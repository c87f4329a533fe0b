#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiltsense/beam.hpp"
#include "tiltsense/model.hpp"
#include "tiltsense/polarization.hpp"
#include "tiltsense/schemes.hpp"

namespace tiltsense::cli {

/// Invalid configuration. where() is a JSON pointer ("/grid/z/2") or, for
/// syntax errors, "line L, column C".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct MonteCarloConfig {
  std::uint64_t nu = 0;
  std::uint64_t trials = 200;
  std::uint64_t seed = 1;
  std::optional<Interval> search;  // default: theta +- half_width_sigma * CR spread
  double half_width_sigma = 6.0;
};

struct ScenarioConfig {
  double k = 0.0;
  double w0 = 0.0;
  std::vector<double> xi{0.0};
  std::string scheme_type;  // empty when the file has no scheme block
  SplitLine split = SplitLine::displacement;
  PolarizationState pol = PolarizationState::diagonal();
  std::vector<double> theta;
  std::vector<double> z;
  std::vector<double> x;
  std::optional<MonteCarloConfig> montecarlo;
  nlohmann::json source;

  double rayleigh_range() const { return k * w0 * w0 / 2.0; }
  BeamParams beam(double displacement) const { return BeamParams(k, w0, displacement); }
  /// Scheme of the configured type with its detector at z.
  Scheme scheme(double z) const;
};

/// Accepted scheme names, in the order of the Scheme alternatives.
const std::vector<std::string>& scheme_types();

/// Every physical quantity carries its unit as a string ("633nm", "5z_R").
/// Grids are a list of values or {"start", "stop", "count"} and must be
/// nonempty and strictly increasing. Unknown keys are rejected.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace tiltsense::cli
