#pragma once

#include <stdexcept>

namespace frameflow {

// Invalid or inconsistent configuration values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions between values that must agree.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside its mathematical domain.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File ingestion or storage failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Singular systems, divergence, non-finite results.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace frameflow
