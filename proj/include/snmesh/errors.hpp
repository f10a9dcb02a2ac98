#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace snmesh {

/// Precondition violated by a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation requested outside the domain where a quantity is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mesh edges crossed, collapsed, or were supplied out of order.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent problem configuration (e.g. a closure applied to the wrong problem).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure (quadrature, fit) failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time integration gave up. Carries the last accepted time and state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_t, std::vector<double> last_y)
      : std::runtime_error(what), last_t_(last_t), last_y_(std::move(last_y)) {}

  double last_t() const noexcept { return last_t_; }
  const std::vector<double>& last_y() const noexcept { return last_y_; }

 private:
  double last_t_;
  std::vector<double> last_y_;
};

}  // namespace snmesh
