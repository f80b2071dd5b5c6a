#pragma once

#include <stdexcept>
#include <string>

namespace qfs {

// Bad input: unknown scenario, malformed config file, parameter out of range.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical contract was violated at runtime: norm drift, packet hitting
// the grid boundary, guidance evaluated at a node, CFL-type step failure.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Guidance undefined: |psi|^2 at the configuration is below the node guard.
class NodeError : public NumericalError {
 public:
  explicit NodeError(const std::string& msg) : NumericalError(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qfs
