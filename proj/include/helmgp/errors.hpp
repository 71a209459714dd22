#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace helmgp {

// Bad experiment/CLI configuration (exit code 2 in the CLI).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problems with input data: ingest, simulation domain, empty selections
// (exit code 3 in the CLI).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : DataError {
  using DataError::DataError;
};

struct CorruptInputError : DataError {
  using DataError::DataError;
};

struct EmptySelectionError : DataError {
  using DataError::DataError;
};

struct OutOfDomainError : DataError {
  OutOfDomainError(int buoy_, double time_, const std::string& what)
      : DataError(what), buoy(buoy_), time(time_) {}
  int buoy;
  double time;
};

// Numerical failures: factorization, optimizer divergence (exit code 4).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularKernelError : NumericalError {
  SingularKernelError(double jitter, const std::string& what)
      : NumericalError(what), jitter_tried(jitter) {}
  double jitter_tried;
};

struct OptimizerDiverged : NumericalError {
  OptimizerDiverged(std::vector<double> trace_, const std::string& what)
      : NumericalError(what), trace(std::move(trace_)) {}
  std::vector<double> trace;
};

struct GradientFailure : NumericalError {
  GradientFailure(int coordinate_, const std::string& what)
      : NumericalError(what), coordinate(coordinate_) {}
  int coordinate;
};

}  // namespace helmgp
