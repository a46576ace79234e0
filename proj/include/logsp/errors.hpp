#pragma once

#include <stdexcept>
#include <string>

namespace logsp {

struct InvalidGridError : std::runtime_error {
  explicit InvalidGridError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShootingFailureError : std::runtime_error {
  explicit ShootingFailureError(const std::string& msg) : std::runtime_error(msg) {}
};

struct KernelMismatchError : std::runtime_error {
  explicit KernelMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateFieldError : std::runtime_error {
  explicit DegenerateFieldError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SupercriticalMassError : std::runtime_error {
  explicit SupercriticalMassError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResolutionError : std::runtime_error {
  explicit ResolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CenteringError : std::runtime_error {
  explicit CenteringError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PositivityError : std::runtime_error {
  explicit PositivityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace logsp
