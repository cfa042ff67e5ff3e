#pragma once
/// Error hierarchy shared by all srvol modules.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srvol {

/// Base class for all srvol exceptions.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Expression-text syntax error, carrying the byte offset of the problem.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
  std::size_t position;
};

/// A rational function was evaluated at a zero of its denominator.
struct PoleError : Error {
  explicit PoleError(const std::string& what) : Error(what) {}
};

/// A frame failed a nondegeneracy / contact-condition check.
struct DegeneracyError : Error {
  explicit DegeneracyError(const std::string& what) : Error(what) {}
};

/// An iterative numerical procedure failed to meet its tolerance or
/// convergence-order requirement.
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& what) : Error(what) {}
};

/// Invalid user-supplied configuration or argument.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace srvol
