#include "tiltsense/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include "tiltsense/cli/units.hpp"

namespace tiltsense::cli {
namespace {

using nlohmann::json;
using Parser = std::function<double(std::string_view)>;

std::string join(const std::string& base, const std::string& key) { return base + "/" + key; }

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where.empty() ? "/" : where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) throw ConfigError(join(where, key), "unknown key");
  }
}

double quantity(const json& node, const std::string& where, const Parser& parse) {
  if (!node.is_string()) {
    throw ConfigError(where, "expected a string with explicit unit, e.g. \"1mm\"");
  }
  try {
    return parse(node.get<std::string>());
  } catch (const UnitError& e) {
    throw ConfigError(where, e.what());
  }
}

std::uint64_t count(const json& node, const std::string& where, std::uint64_t min) {
  // The parser stores non-negative integer literals as unsigned.
  if (!node.is_number_unsigned()) {
    throw ConfigError(where, "expected a non-negative integer");
  }
  const auto v = node.get<std::uint64_t>();
  if (v < min) throw ConfigError(where, "must be at least " + std::to_string(min));
  return v;
}

std::vector<double> grid(const json& node, const std::string& where, const Parser& parse) {
  std::vector<double> values;
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      values.push_back(quantity(node[i], join(where, std::to_string(i)), parse));
    }
  } else if (node.is_object()) {
    reject_unknown(node, where, {"start", "stop", "count"});
    for (const char* key : {"start", "stop", "count"}) {
      if (!node.contains(key)) throw ConfigError(join(where, key), "missing");
    }
    const double start = quantity(node["start"], join(where, "start"), parse);
    const double stop = quantity(node["stop"], join(where, "stop"), parse);
    const auto n = count(node["count"], join(where, "count"), 1);
    if (n == 1) {
      if (start != stop) throw ConfigError(join(where, "count"), "count 1 needs start == stop");
      values.push_back(start);
    }
    for (std::uint64_t i = 0; n > 1 && i < n; ++i) {
      values.push_back(i + 1 == n ? stop
                                  : start + (stop - start) * static_cast<double>(i) /
                                                static_cast<double>(n - 1));
    }
  } else if (node.is_string()) {
    values.push_back(quantity(node, where, parse));
  } else {
    throw ConfigError(where, "expected a value, a list, or {start, stop, count}");
  }
  if (values.empty()) throw ConfigError(where, "grid is empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw ConfigError(join(where, std::to_string(i)), "grid must be strictly increasing");
    }
  }
  return values;
}

void parse_beam(const json& node, ScenarioConfig& cfg) {
  const std::string where = "/beam";
  reject_unknown(node, where, {"wavelength", "wavenumber", "w0", "rayleigh_range", "xi"});
  const bool has_lambda = node.contains("wavelength");
  if (has_lambda == node.contains("wavenumber")) {
    throw ConfigError(where, "give exactly one of wavelength or wavenumber");
  }
  if (has_lambda) {
    const double lambda =
        quantity(node["wavelength"], join(where, "wavelength"), [](auto s) { return parse_length(s); });
    if (!(lambda > 0.0)) throw ConfigError(join(where, "wavelength"), "must be positive");
    cfg.k = 2.0 * std::numbers::pi / lambda;
  } else {
    cfg.k = quantity(node["wavenumber"], join(where, "wavenumber"), parse_wavenumber);
    if (!(cfg.k > 0.0)) throw ConfigError(join(where, "wavenumber"), "must be positive");
  }
  const bool has_w0 = node.contains("w0");
  if (has_w0 == node.contains("rayleigh_range")) {
    throw ConfigError(where, "give exactly one of w0 or rayleigh_range");
  }
  if (has_w0) {
    cfg.w0 = quantity(node["w0"], join(where, "w0"), [](auto s) { return parse_length(s); });
    if (!(cfg.w0 > 0.0)) throw ConfigError(join(where, "w0"), "must be positive");
  } else {
    const double zr = quantity(node["rayleigh_range"], join(where, "rayleigh_range"),
                               [](auto s) { return parse_length(s); });
    if (!(zr > 0.0)) throw ConfigError(join(where, "rayleigh_range"), "must be positive");
    cfg.w0 = std::sqrt(2.0 * zr / cfg.k);
  }
  if (node.contains("xi")) {
    cfg.xi = grid(node["xi"], join(where, "xi"), [](auto s) { return parse_length(s); });
  }
}

void parse_scheme(const json& node, ScenarioConfig& cfg) {
  const std::string where = "/scheme";
  reject_unknown(node, where, {"type", "split"});
  if (!node.contains("type") || !node["type"].is_string()) {
    throw ConfigError(join(where, "type"), "expected one scheme name");
  }
  cfg.scheme_type = node["type"].get<std::string>();
  const auto& names = scheme_types();
  if (std::find(names.begin(), names.end(), cfg.scheme_type) == names.end()) {
    throw ConfigError(join(where, "type"), "unknown scheme '" + cfg.scheme_type + "'");
  }
  if (node.contains("split")) {
    const json& s = node["split"];
    if (s == "displacement") {
      cfg.split = SplitLine::displacement;
    } else if (s == "origin") {
      cfg.split = SplitLine::origin;
    } else {
      throw ConfigError(join(where, "split"), "expected \"displacement\" or \"origin\"");
    }
  }
}

void parse_polarization(const json& node, ScenarioConfig& cfg) {
  const std::string where = "/polarization";
  reject_unknown(node, where, {"state", "vartheta", "phi"});
  if (node.contains("state")) {
    if (node.contains("vartheta") || node.contains("phi")) {
      throw ConfigError(where, "give either state or vartheta/phi");
    }
    const json& s = node["state"];
    if (s == "+" || s == "diagonal") {
      cfg.pol = PolarizationState::diagonal();
    } else if (s == "H") {
      cfg.pol = PolarizationState::horizontal();
    } else if (s == "V") {
      cfg.pol = PolarizationState::vertical();
    } else {
      throw ConfigError(join(where, "state"), "expected \"+\", \"H\" or \"V\"");
    }
    return;
  }
  const double polar = node.contains("vartheta")
                           ? quantity(node["vartheta"], join(where, "vartheta"), parse_angle)
                           : std::numbers::pi / 2.0;
  const double azimuth =
      node.contains("phi") ? quantity(node["phi"], join(where, "phi"), parse_angle) : 0.0;
  if (polar < 0.0 || polar > std::numbers::pi) {
    throw ConfigError(join(where, "vartheta"), "must lie in [0, pi]");
  }
  cfg.pol = PolarizationState::from_bloch(polar, azimuth);
}

void parse_grid(const json& node, ScenarioConfig& cfg) {
  const std::string where = "/grid";
  reject_unknown(node, where, {"theta", "z", "x"});
  const double zr = cfg.rayleigh_range();
  if (node.contains("theta")) cfg.theta = grid(node["theta"], join(where, "theta"), parse_angle);
  if (node.contains("z")) {
    cfg.z = grid(node["z"], join(where, "z"), [zr](auto s) { return parse_length(s, zr); });
    if (cfg.z.front() < 0.0) throw ConfigError(join(where, "z/0"), "detector plane needs z >= 0");
  }
  if (node.contains("x")) {
    cfg.x = grid(node["x"], join(where, "x"), [zr](auto s) { return parse_length(s, zr); });
  }
}

void parse_montecarlo(const json& node, ScenarioConfig& cfg) {
  const std::string where = "/montecarlo";
  reject_unknown(node, where, {"nu", "energy", "trials", "seed", "search", "half_width_sigma"});
  MonteCarloConfig mc;
  if (node.contains("nu") == node.contains("energy")) {
    throw ConfigError(where, "give exactly one of nu or energy");
  }
  if (node.contains("nu")) {
    mc.nu = count(node["nu"], join(where, "nu"), 1);
  } else {
    // One detection per photon: nu = E / (h c / lambda).
    constexpr double kPlanck = 6.62607015e-34;
    constexpr double kLight = 299792458.0;
    const double energy = quantity(node["energy"], join(where, "energy"), parse_energy);
    const double lambda = 2.0 * std::numbers::pi / cfg.k;
    const double photons = std::floor(energy * lambda / (kPlanck * kLight));
    if (!(photons >= 1.0)) throw ConfigError(join(where, "energy"), "less than one photon");
    if (photons > 1e12) throw ConfigError(join(where, "energy"), "more than 1e12 photons");
    mc.nu = static_cast<std::uint64_t>(photons);
  }
  if (node.contains("trials")) mc.trials = count(node["trials"], join(where, "trials"), 1);
  if (node.contains("seed")) mc.seed = count(node["seed"], join(where, "seed"), 0);
  if (node.contains("search")) {
    const auto s = grid(node["search"], join(where, "search"), parse_angle);
    if (s.size() != 2) throw ConfigError(join(where, "search"), "expected [lo, hi]");
    mc.search = Interval{s[0], s[1]};
  }
  if (node.contains("half_width_sigma")) {
    const json& h = node["half_width_sigma"];
    if (!h.is_number() || !(h.get<double>() > 0.0)) {
      throw ConfigError(join(where, "half_width_sigma"), "expected a positive number");
    }
    mc.half_width_sigma = h.get<double>();
  }
  cfg.montecarlo = mc;
}

}  // namespace

const std::vector<std::string>& scheme_types() {
  static const std::vector<std::string> names{"position", "quadrant", "sagnac_polarization",
                                              "sagnac_position_polarization"};
  return names;
}

Scheme ScenarioConfig::scheme(double detector_z) const {
  if (scheme_type == "position") return DirectPosition{detector_z};
  if (scheme_type == "quadrant") return Quadrant{detector_z, split};
  if (scheme_type == "sagnac_polarization") return SagnacPolarization{detector_z, pol};
  if (scheme_type == "sagnac_position_polarization") {
    return SagnacPositionPolarization{detector_z, pol};
  }
  throw ConfigError("/scheme", "no scheme configured");
}

ScenarioConfig parse_config(const json& doc) {
  reject_unknown(doc, "", {"beam", "scheme", "polarization", "grid", "montecarlo"});
  ScenarioConfig cfg;
  cfg.source = doc;
  if (!doc.contains("beam")) throw ConfigError("/beam", "missing");
  parse_beam(doc["beam"], cfg);
  if (doc.contains("scheme")) parse_scheme(doc["scheme"], cfg);
  if (doc.contains("polarization")) parse_polarization(doc["polarization"], cfg);
  if (doc.contains("grid")) parse_grid(doc["grid"], cfg);
  if (doc.contains("montecarlo")) parse_montecarlo(doc["montecarlo"], cfg);
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line and column.
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column),
                      "invalid JSON");
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace tiltsense::cli
