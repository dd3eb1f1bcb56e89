#pragma once

#include <stdexcept>
#include <string>

namespace vdelta {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input cannot be turned into a probability distribution (all zero, negative sum).
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// Grid dimensions are not divisible by the requested block counts.
class InvalidPartition : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ZeroMassBlock : public Error {
 public:
  using Error::Error;
};

/// The tolerance band admits no mass vector summing to one.
class InfeasibleBand : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file content (user-facing, maps to a usage error).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vdelta
