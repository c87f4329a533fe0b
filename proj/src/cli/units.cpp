#include "tiltsense/cli/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace tiltsense::cli {
namespace {

struct Unit {
  std::string_view suffix;
  double scale;
};

constexpr std::array kLengths{
    Unit{"m", 1.0},    Unit{"cm", 1e-2},  Unit{"mm", 1e-3}, Unit{"um", 1e-6},
    Unit{"µm", 1e-6},  Unit{"nm", 1e-9},  Unit{"pm", 1e-12}, Unit{"km", 1e3},
};
constexpr std::array kAngles{
    Unit{"rad", 1.0},   Unit{"mrad", 1e-3}, Unit{"urad", 1e-6}, Unit{"µrad", 1e-6},
    Unit{"nrad", 1e-9}, Unit{"prad", 1e-12},
    Unit{"deg", std::numbers::pi / 180.0},
};
constexpr std::array kEnergies{
    Unit{"J", 1.0},    Unit{"mJ", 1e-3}, Unit{"uJ", 1e-6}, Unit{"µJ", 1e-6},
    Unit{"nJ", 1e-9},  Unit{"pJ", 1e-12}, Unit{"fJ", 1e-15}, Unit{"aJ", 1e-18},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits "1.5e-3 mm" into the number and the trimmed unit text.
std::pair<double, std::string_view> split_number(std::string_view text, const char* what) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr == first) {
    throw UnitError("expected a " + std::string(what) + " with a unit, got '" +
                    std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw UnitError("non-finite " + std::string(what) + " '" + std::string(text) + "'");
  }
  return {value, trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)))};
}

template <std::size_t N>
double scaled(std::string_view text, const std::array<Unit, N>& units, const char* what) {
  const auto [value, unit] = split_number(text, what);
  for (const Unit& u : units) {
    if (unit == u.suffix) return value * u.scale;
  }
  if (unit.empty()) {
    throw UnitError(std::string(what) + " '" + std::string(text) + "' has no unit");
  }
  throw UnitError("unknown " + std::string(what) + " unit '" + std::string(unit) + "' in '" +
                  std::string(text) + "'");
}

}  // namespace

double parse_length(std::string_view text, double rayleigh_range) {
  const auto [value, unit] = split_number(text, "length");
  if (unit == "z_R" || unit == "zR" || unit == "z_r") {
    if (!(rayleigh_range > 0.0)) {
      throw UnitError("'" + std::string(text) + "' uses z_R before the beam is defined");
    }
    return value * rayleigh_range;
  }
  return scaled(text, kLengths, "length");
}

double parse_angle(std::string_view text) { return scaled(text, kAngles, "angle"); }

double parse_energy(std::string_view text) { return scaled(text, kEnergies, "energy"); }

double parse_wavenumber(std::string_view text) {
  const auto [value, unit] = split_number(text, "wavenumber");
  std::string_view per = unit;
  if (per.starts_with("rad")) per.remove_prefix(3);
  if (!per.starts_with("/")) {
    throw UnitError("wavenumber '" + std::string(text) + "' must be per length, e.g. 9.9e6/m");
  }
  per.remove_prefix(1);
  for (const Unit& u : kLengths) {
    if (per == u.suffix) return value / u.scale;
  }
  throw UnitError("unknown wavenumber unit in '" + std::string(text) + "'");
}

}  // namespace tiltsense::cli
