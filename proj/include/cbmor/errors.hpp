// SPDX-License-Identifier: Apache-2.0

#ifndef CBMOR_ERRORS_HPP
#define CBMOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cbmor {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class MeshError : public Error {
 public:
  explicit MeshError(const std::string& what) : Error(what) {}
};

class LayoutError : public Error {
 public:
  explicit LayoutError(const std::string& what) : Error(what) {}
};

class InterfaceError : public Error {
 public:
  explicit InterfaceError(const std::string& what) : Error(what) {}
};

/// Non-positive Jacobian of the deformation map in some element.
class ElementInversionError : public Error {
 public:
  ElementInversionError(int element, const std::string& what)
      : Error(what), element_id(element) {}
  int element_id;
};

/// Newton iteration exhausted without reaching the residual tolerance.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(double residual, const std::string& what)
      : Error(what), last_residual(residual) {}
  double last_residual;
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace cbmor

#endif
