#pragma once

#include <stdexcept>
#include <string_view>

namespace tiltsense::cli {

/// Thrown for malformed quantities; the config layer adds the JSON location.
class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "633nm", "1.5 mm", "2e-3m", "5z_R". A z_R suffix needs rayleigh_range.
double parse_length(std::string_view text, double rayleigh_range = 0.0);
/// "1urad", "1µrad", "0.5mrad", "2deg", "0rad".
double parse_angle(std::string_view text);
/// "1nJ", "2.5e-12J".
double parse_energy(std::string_view text);
/// "9.93e6/m", "9.93e6rad/m", "1/um".
double parse_wavenumber(std::string_view text);

}  // namespace tiltsense::cli
