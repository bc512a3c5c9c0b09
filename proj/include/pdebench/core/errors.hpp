#pragma once

#include <stdexcept>
#include <string>

namespace pdebench {

// Base class so callers can catch everything from this library at once.
struct BenchError : std::runtime_error {
  explicit BenchError(const std::string& msg) : std::runtime_error(msg) {}
};

// Explicit time step exceeds the scheme's stability bound.
struct StabilityViolation : BenchError {
  using BenchError::BenchError;
};

// NaN or Inf appeared where a finite value is required.
struct NonFiniteError : BenchError {
  using BenchError::BenchError;
};

// Relative error against a zero-norm target is undefined.
struct DegenerateTarget : BenchError {
  using BenchError::BenchError;
};

// Array extents do not match what an operation requires.
struct ShapeError : BenchError {
  using BenchError::BenchError;
};

// Bad configuration value; message carries the config path.
struct ConfigError : BenchError {
  using BenchError::BenchError;
};

// File or container level failure (HDF5, manifest, record log).
struct IoError : BenchError {
  using BenchError::BenchError;
};

}  // namespace pdebench
