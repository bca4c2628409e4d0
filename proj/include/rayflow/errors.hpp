#pragma once

#include <stdexcept>
#include <string>

namespace rayflow {

/// Malformed structure: bad indices, dimension mismatches, non-square matrices.
struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Input outside a model's declared domain (boundary point fed to an
/// open-cone field, nonpositive numeraire, eps <= 0, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values produced during evaluation or integration.
/// Carries the last time at which the state was still good.
struct NumericError : std::runtime_error {
  NumericError(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time(last_good_time) {}
  double last_good_time;
};

/// Invalid integrator or checker configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMatrixError : std::runtime_error {
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by brute-force scans above their supported dimension.
struct UnsupportedDimensionError : std::runtime_error {
  explicit UnsupportedDimensionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rayflow
