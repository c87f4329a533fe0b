#pragma once

#include <stdexcept>
#include <string>

namespace tiltsense {

/// A numerical procedure did not reach its required tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Monte Carlo statistical check failed.
class StatisticalCheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tiltsense
