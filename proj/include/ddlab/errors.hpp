#pragma once

#include <stdexcept>
#include <string>

namespace ddlab {

// Bad inputs: malformed config files, unknown keys, dimension mismatches.
// The CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures (divergence, degenerate decompositions).
// The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class DivergenceError : public NumericalError {
public:
  explicit DivergenceError(const std::string& what) : NumericalError(what) {}
};

}  // namespace ddlab
