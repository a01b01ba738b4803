// Copyright 2026 the bioflux authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace bioflux {

// Invalid argument / parameter outside its admissible range.
struct InvalidParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Field values outside the mathematical domain of an operation
// (negative density where n >= 0 is required, etc.).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Iterative solver failed to reach the requested residual.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), residual(achieved_residual) {}
  double residual;
};

// Neumann problem with an incompatible (non mean-zero) right-hand side.
struct CompatibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An explicit update produced a negative value: dt exceeded the stable bound.
struct CflViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration text; carries the offending line where known.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what, int line_no = 0)
      : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what
                                       : what),
        line(line_no) {}
  int line;
};

// Corrupt or unsupported snapshot / report file.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bioflux
