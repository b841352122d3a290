#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invdens {

/// Error categories surfaced through the C API as status codes.
enum class ErrorCode : int {
  kParameter = 1,
  kNumerical = 2,
  kUnsupported = 3,
  kConfig = 4,
  kDimensionality = 5,
  kSimulation = 6,
  kIo = 7,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& what) : Error(ErrorCode::kParameter, what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorCode::kNumerical, what) {}
};

struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& what) : Error(ErrorCode::kUnsupported, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::kConfig, what) {}
};

struct DimensionalityError : Error {
  explicit DimensionalityError(const std::string& what)
      : Error(ErrorCode::kDimensionality, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

/// Raised when the drift produces a non-finite value; carries the observation index.
class SimulationError : public Error {
public:
  SimulationError(std::size_t index, const std::string& what)
      : Error(ErrorCode::kSimulation, what + " (observation index " + std::to_string(index) + ")"),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

} // namespace invdens
