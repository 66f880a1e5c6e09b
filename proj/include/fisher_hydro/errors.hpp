#pragma once

#include <stdexcept>
#include <string>

namespace fisher_hydro {

/// Invalid user-facing configuration (bad keys, out-of-range parameters).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values or an empty mask met during a computation.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fisher_hydro
