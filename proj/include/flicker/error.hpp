#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flicker {

// Caller supplied something that violates a documented precondition or
// invariant. The CLI maps this family to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Tensor shapes that cannot be combined.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Malformed on-disk artifact. Messages name the byte offset.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// A checkpoint that does not belong to the requested architecture.
class ArchitectureMismatch : public FormatError {
 public:
  using FormatError::FormatError;
};

// Non-finite loss during classifier training.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// Non-finite objective during an attack.
class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flicker
