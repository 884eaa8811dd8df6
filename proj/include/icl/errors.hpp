// Error taxonomy shared by all modules.  Two bases: ValidationError covers
// bad inputs (CLI exit code 1), RuntimeError covers solver/numeric failures
// (CLI exit code 2).
#pragma once

#include <stdexcept>
#include <string>

namespace icl {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// codec
struct InvalidPair : ValidationError {
  using ValidationError::ValidationError;
};
struct LengthMismatch : ValidationError {
  using ValidationError::ValidationError;
};

// magnetics
struct GeometryError : ValidationError {
  using ValidationError::ValidationError;
};
struct SingularityError : RuntimeError {
  using RuntimeError::RuntimeError;
};
struct ModelError : RuntimeError {
  using RuntimeError::RuntimeError;
};

// netlist
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};
struct OrderError : ValidationError {
  using ValidationError::ValidationError;
};
struct PassivityError : RuntimeError {
  using RuntimeError::RuntimeError;
};

// sim
struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};
struct SolverError : RuntimeError {
  using RuntimeError::RuntimeError;
};
struct WindowError : ValidationError {
  using ValidationError::ValidationError;
};

// metrics
struct ShapeError : ValidationError {
  using ValidationError::ValidationError;
};
struct DegenerateError : ValidationError {
  using ValidationError::ValidationError;
};

// harness
struct SchemaError : ValidationError {
  using ValidationError::ValidationError;
};
struct PathError : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace icl
