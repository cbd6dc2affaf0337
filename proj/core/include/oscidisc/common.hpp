#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace oscidisc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Shapes of cooperating objects disagree (state length, column counts, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite state.
class BlowupError : public Error {
 public:
  BlowupError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// A regression subproblem has too few samples for its library.
class UnderdeterminedError : public ArgumentError {
 public:
  UnderdeterminedError(const std::string& what, std::string region)
      : ArgumentError(what), region_(std::move(region)) {}

  const std::string& region() const noexcept { return region_; }

 private:
  std::string region_;
};

}  // namespace oscidisc
