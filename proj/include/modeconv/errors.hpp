#pragma once

#include <stdexcept>
#include <string>

namespace modeconv {

// Invalid physical or numerical parameters. The CLI maps this to exit code 3.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A ligament or mesh cannot be constructed as requested.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Factorization or solve failed. The CLI maps this to exit code 4.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two runs cannot be combined (different parameters or meshes).
class IncomparableRunsError : public std::runtime_error {
 public:
  IncomparableRunsError(const std::string& what)
      : std::runtime_error("incomparable runs: " + what) {}
};

// Richardson extrapolation or mesh-convergence study did not settle.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace modeconv
